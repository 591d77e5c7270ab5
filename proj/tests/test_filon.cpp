#include <doctest.h>

#include <cmath>

#include "declab/filon.hpp"

using namespace declab;

namespace {

// high-resolution Simpson oracle for \int_{-h}^{h} u^m e^{i theta u} du
Complex moment_oracle(double theta, double h, int m) {
    const int N = 200000;  // even
    const double step = 2.0 * h / N;
    Complex acc(0.0, 0.0);
    for (int i = 0; i <= N; ++i) {
        const double u = -h + i * step;
        double um = 1.0;
        for (int k = 0; k < m; ++k) um *= u;
        const Complex f = um * std::exp(Complex(0.0, theta * u));
        const double w = (i == 0 || i == N) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += w * f;
    }
    return acc * (step / 3.0);
}

} // namespace

TEST_CASE("oscillatory moments match quadrature across the series switch") {
    for (double theta : {0.0, 1e-8, 0.3, 2.0, 15.0, 400.0}) {
        for (double h : {0.01, 0.2, 1.5}) {
            Complex m0, m1, m2;
            filon_moments(theta, h, m0, m1, m2);
            CHECK(std::abs(m0 - moment_oracle(theta, h, 0)) < 1e-12 * std::max(1.0, std::abs(m0)));
            CHECK(std::abs(m1 - moment_oracle(theta, h, 1)) < 1e-12 * std::max(1.0, h * h));
            CHECK(std::abs(m2 - moment_oracle(theta, h, 2)) < 1e-12 * std::max(1.0, h * h * h));
        }
    }
}

TEST_CASE("gaussian transform matches a fine trapezoid oracle at all frequencies") {
    auto grid = make_spectrum_grid(-0.5, 10.0, 32, 10);
    const double center = 2.0, width = 0.25;
    const Eigen::VectorXcd g = gaussian_amplitude(*grid, center, width);

    // capture the profile as a function with the same normalization constant
    double raw_mass = 0.0;
    for (Eigen::Index k = 0; k < grid->nodes.size(); ++k) {
        const double x = (grid->nodes[k] - center) / (2.0 * width);
        raw_mass += grid->weights[k] * std::exp(-2.0 * x * x);
    }
    const double scale = 1.0 / std::sqrt(raw_mass);
    auto fn = [&](double w) {
        const double x = (w - center) / (2.0 * width);
        return scale * std::exp(-x * x);
    };

    FilonIntegrator filon(grid, FilonOptions{64});
    for (double theta : {0.0, 0.5, 3.0, 20.0, 50.0, 120.0}) {
        const Complex computed = filon.integrate(g, theta);
        const std::size_t N = 1000000;
        const double h = 10.0 / static_cast<double>(N);
        Complex oracle(0.0, 0.0);
        for (std::size_t i = 0; i <= N; ++i) {
            const double w = static_cast<double>(i) * h;
            const Complex f = fn(w) * std::exp(Complex(0.0, theta * w));
            oracle += (i == 0 || i == N) ? 0.5 * f : f;
        }
        oracle *= h;
        CHECK(std::abs(computed - oracle) < 1e-9);
    }
}

TEST_CASE("theta = 0 reduces to the plain quadrature for polynomial samples") {
    auto grid = make_spectrum_grid(-0.5, 4.0, 4, 6);
    Eigen::VectorXcd samples(grid->nodes.size());
    for (Eigen::Index k = 0; k < grid->nodes.size(); ++k) {
        const double w = grid->nodes[k];
        samples[k] = Complex(1.0 + 0.5 * w - 0.25 * w * w, 0.0);
    }
    FilonIntegrator filon(grid, FilonOptions{16});
    const Complex via_filon = filon.integrate(samples, 0.0);
    const Complex via_weights = (grid->weights.cast<Complex>().array() * samples.array()).sum();
    CHECK(std::abs(via_filon - via_weights) < 1e-12);
}
