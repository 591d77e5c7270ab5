// delta_well.hpp — analytic eigenfunctions of H = p^2/2 - g delta(q)
//
// One even bound state plus a doubly degenerate continuum labeled by parity.
// Quantization carries the same dimensionless hbar used by the phase-space
// transform; at hbar = 1 the familiar textbook values hold (bound energy
// -g^2/2, even-channel phase shift tan(delta) = g/k).
//
// Normalization: the bound state is unit-normalized; continuum states are
// energy-delta normalized, <psi_w|psi_w'> = delta(w - w'), which matches the
// spectral quadrature convention (momentum-delta states rescaled by
// 1/sqrt(hbar^2 k), since dw = hbar^2 k dk).
#pragma once

#include <Eigen/Dense>

#include "declab/common.hpp"
#include "declab/spectral_core.hpp"

namespace declab {

struct DeltaWellModel {
    double g = 1.0;        // coupling, > 0
    double hbar = 1.0;
    double kappa = 1.0;    // bound inverse width, g / hbar^2
    double omega0 = -0.5;  // bound energy, -g^2 / (2 hbar^2)

    double k_of(double omega) const { return std::sqrt(2.0 * omega) / hbar; }

    // even-channel phase shift, tan(delta) = kappa / k
    double phase_shift(double omega) const { return std::atan2(kappa, k_of(omega)); }

    double bound(double q) const { return std::sqrt(kappa) * std::exp(-kappa * std::abs(q)); }

    double even(double omega, double q) const {
        const double k = k_of(omega);
        const double d = std::atan2(kappa, k);
        return std::cos(k * std::abs(q) + d) / std::sqrt(M_PI * hbar * hbar * k);
    }

    double odd(double omega, double q) const {
        const double k = k_of(omega);
        return std::sin(k * q) / std::sqrt(M_PI * hbar * hbar * k);
    }

    // parity labels: +1 (even) and -1 (odd)
    QuantumNumbers parity_labels() const { return QuantumNumbers::single_axis({+1, -1}); }

    // continuum eigenfunction for a parity label value
    double continuum_eval(double omega, int label_value, double q) const {
        return label_value > 0 ? even(omega, q) : odd(omega, q);
    }

    // bound-sector eigenfunction; the odd channel is empty
    double bound_eval(int label_value, double q) const {
        return label_value > 0 ? bound(q) : 0.0;
    }
};

DeltaWellModel deltawell_model(double g, double hbar = 1.0);

// stationary-equation residuals and orthogonality defects on a symmetric
// uniform grid (diagnostic)
struct EigenfunctionReport {
    double bound_residual = 0.0;        // max |H psi - w psi| away from q = 0
    double even_residual = 0.0;
    double odd_residual = 0.0;
    double bound_norm_defect = 0.0;     // | ||psi0||^2 - 1 |
    double parity_cross_overlap = 0.0;  // |<even|odd>| on the grid
    double bound_even_overlap = 0.0;    // |<psi0|psi_even>| on the grid
};

// half_points intervals per side (must be even), grid [-length, length];
// probe_omega picks the continuum energy used for the checks
EigenfunctionReport eigenfunction_check(const DeltaWellModel& model, double length,
                                        int half_points, double probe_omega);

} // namespace declab
