// filon.hpp — oscillatory quadrature of node-sampled profiles
//
// Computes I(theta) = \int_0^{omega_max} f(w) e^{i theta w} dw from samples of
// f at the composite Gauss-Legendre nodes. Each panel's samples are lifted to
// the degree-(order-1) interpolant, resampled on a fine uniform subgrid, and
// integrated segment-by-segment against exact polynomial-times-exponential
// moments. Accuracy is uniform in theta; cost is linear in the node count.
#pragma once

#include <Eigen/Dense>

#include "declab/spectral_core.hpp"

namespace declab {

struct FilonOptions {
    int segments_per_panel = 64;   // quadratic segments per panel (>= 2)
};

// exact moments \int_{-h}^{h} u^m e^{i theta u} du for m = 0, 1, 2
// (series evaluation near theta*h = 0, closed forms otherwise)
void filon_moments(double theta, double h, Complex& m0, Complex& m1, Complex& m2);

class FilonIntegrator {
public:
    explicit FilonIntegrator(GridPtr grid, FilonOptions opt = {});

    // node_samples has one value per grid node
    Complex integrate(const Eigen::VectorXcd& node_samples, double theta) const;

    const SpectrumGrid& grid() const { return *grid_; }

private:
    GridPtr grid_;
    int segments_;
    double seg_half_;                 // physical segment half-width (equal panels)
    Eigen::MatrixXd interp_;          // (2*segments+1) x order resampling matrix
    std::vector<double> centers_;     // physical segment centers, panel-major
};

} // namespace declab
