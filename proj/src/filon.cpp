#include "declab/filon.hpp"

#include <cmath>

#include "declab/gauss_legendre.hpp"

namespace declab {

void filon_moments(double theta, double h, Complex& m0, Complex& m1, Complex& m2) {
    const double x = theta * h;
    if (std::abs(x) < 0.5) {
        // series: m0 = 2h sum (-x^2)^j/(2j+1)!,
        //         m1 = 2i h^2 sum (2j+2)(-1)^j x^{2j+1}/(2j+3)!,
        //         m2 = 2h^3 sum (2j+2)(2j+1)(-1)^j x^{2j}/(2j+3)!
        double s0 = 0.0, s1 = 0.0, s2 = 0.0;
        double pow_x2 = 1.0;          // x^{2j}
        double fact = 1.0;            // (2j+1)! running value
        for (int j = 0; j <= 10; ++j) {
            const double sign = (j % 2 == 0) ? 1.0 : -1.0;
            const double f3 = fact * (2 * j + 2) * (2 * j + 3);  // (2j+3)!
            s0 += sign * pow_x2 / fact;
            s1 += sign * (2 * j + 2) * pow_x2 * x / f3;
            s2 += sign * (2 * j + 2) * (2 * j + 1) * pow_x2 / f3;
            pow_x2 *= x * x;
            fact = f3;                 // (2(j+1)+1)! = (2j+3)!
        }
        m0 = Complex(2.0 * h * s0, 0.0);
        m1 = Complex(0.0, 2.0 * h * h * s1);
        m2 = Complex(2.0 * h * h * h * s2, 0.0);
        return;
    }
    const double s = std::sin(x), c = std::cos(x);
    m0 = Complex(2.0 * s / theta, 0.0);
    m1 = Complex(0.0, 2.0 * (s - x * c) / (theta * theta));
    m2 = Complex(2.0 * ((x * x - 2.0) * s + 2.0 * x * c) / (theta * theta * theta), 0.0);
}

FilonIntegrator::FilonIntegrator(GridPtr grid, FilonOptions opt)
    : grid_(std::move(grid)), segments_(opt.segments_per_panel) {
    require(grid_ != nullptr, "FilonIntegrator: null grid");
    require(segments_ >= 2, "FilonIntegrator: need >= 2 segments per panel");

    const int order = grid_->panel_order;
    const GaussLegendreRule ref = gauss_legendre(order);
    const std::vector<double> bw = barycentric_weights(ref.nodes);

    // resampling matrix from panel GL nodes to the fine uniform reference grid
    const int fine = 2 * segments_ + 1;
    interp_.resize(fine, order);
    for (int i = 0; i < fine; ++i) {
        const double x = -1.0 + 2.0 * i / (fine - 1);
        // exact hit on a node keeps the sample value
        int hit = -1;
        for (int j = 0; j < order; ++j)
            if (std::abs(x - ref.nodes[static_cast<std::size_t>(j)]) < 1e-14) hit = j;
        if (hit >= 0) {
            interp_.row(i).setZero();
            interp_(i, hit) = 1.0;
            continue;
        }
        double denom = 0.0;
        for (int j = 0; j < order; ++j)
            denom += bw[static_cast<std::size_t>(j)] / (x - ref.nodes[static_cast<std::size_t>(j)]);
        for (int j = 0; j < order; ++j)
            interp_(i, j) = (bw[static_cast<std::size_t>(j)] /
                             (x - ref.nodes[static_cast<std::size_t>(j)])) / denom;
    }

    const double panel_width = grid_->panels[1] - grid_->panels[0];
    seg_half_ = 0.5 * panel_width / segments_;
    centers_.reserve(grid_->n_panels() * static_cast<std::size_t>(segments_));
    for (std::size_t p = 0; p < grid_->n_panels(); ++p) {
        const double a = grid_->panels[p];
        for (int j = 0; j < segments_; ++j)
            centers_.push_back(a + (2 * j + 1) * seg_half_);
    }
}

Complex FilonIntegrator::integrate(const Eigen::VectorXcd& node_samples, double theta) const {
    const int order = grid_->panel_order;
    require(node_samples.size() == grid_->nodes.size(), "FilonIntegrator: sample count mismatch");

    Complex m0, m1, m2;
    filon_moments(theta, seg_half_, m0, m1, m2);
    const double inv_h = 1.0 / seg_half_;

    Complex total(0.0, 0.0);
    Eigen::VectorXcd fine;
    for (std::size_t p = 0; p < grid_->n_panels(); ++p) {
        fine = interp_ * node_samples.segment(static_cast<Eigen::Index>(p) * order, order);
        for (int j = 0; j < segments_; ++j) {
            const Complex fm = fine[2 * j];
            const Complex f0 = fine[2 * j + 1];
            const Complex fp = fine[2 * j + 2];
            const Complex a = 0.5 * inv_h * (fp - fm);
            const Complex b = 0.5 * inv_h * inv_h * (fp - 2.0 * f0 + fm);
            const double c = centers_[p * static_cast<std::size_t>(segments_) +
                                      static_cast<std::size_t>(j)];
            const Complex phase = std::exp(Complex(0.0, theta * c));
            total += phase * (f0 * m0 + a * m1 + b * m2);
        }
    }
    return total;
}

} // namespace declab
