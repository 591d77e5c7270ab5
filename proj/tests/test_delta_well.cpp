#include <doctest.h>

#include <cmath>

#include "declab/delta_well.hpp"

using namespace declab;

TEST_CASE("bound energy and inverse width") {
    const DeltaWellModel m = deltawell_model(1.0);
    CHECK(m.omega0 == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(m.kappa == doctest::Approx(1.0));

    const DeltaWellModel m2 = deltawell_model(2.0, 0.5);
    CHECK(m2.omega0 == doctest::Approx(-8.0).epsilon(1e-14));
    CHECK(m2.kappa == doctest::Approx(8.0));

    CHECK_THROWS(deltawell_model(0.0));
    CHECK_THROWS(deltawell_model(-1.0));
    CHECK_THROWS(deltawell_model(1.0, 0.0));
}

TEST_CASE("parity symmetry holds exactly") {
    const DeltaWellModel m = deltawell_model(1.3);
    for (double q : {0.17, 1.9, 6.4}) {
        CHECK(m.even(2.0, -q) == m.even(2.0, q));
        CHECK(m.odd(2.0, -q) == -m.odd(2.0, q));
        CHECK(m.bound(-q) == m.bound(q));
    }
    CHECK(m.odd(2.0, 0.0) == 0.0);
}

TEST_CASE("even-channel phase shift follows atan(kappa/k) and vanishes with g") {
    const double omega = 2.0;
    const DeltaWellModel m = deltawell_model(1.0);
    CHECK(m.phase_shift(omega) == doctest::Approx(std::atan(1.0 / std::sqrt(4.0))).epsilon(1e-14));

    double prev = m.phase_shift(omega);
    for (double g : {0.5, 0.1, 0.01, 1e-4}) {
        const double d = deltawell_model(g).phase_shift(omega);
        CHECK(d < prev);
        prev = d;
    }
    CHECK(prev < 1e-4);
}

TEST_CASE("stationary residuals and orthogonality on the diagnostic grid") {
    const DeltaWellModel m = deltawell_model(1.0);
    const EigenfunctionReport rep = eigenfunction_check(m, 20.0, 1024, 2.0);
    CHECK(rep.bound_residual < 1e-4);
    CHECK(rep.even_residual < 5e-4);
    CHECK(rep.odd_residual < 5e-4);
    CHECK(rep.bound_norm_defect < 1e-7);
    CHECK(rep.parity_cross_overlap < 1e-10);
    CHECK(rep.bound_even_overlap < 1e-6);
}

TEST_CASE("truncated completeness concentrates the identity kernel") {
    // K(q, q') from bound + continuum up to omega_max = 50 g^2 is delta-like:
    // the relative mass beyond |q - q'| > 8/g stays below 1e-2
    const DeltaWellModel m = deltawell_model(1.0);
    auto grid = make_spectrum_grid(m.omega0, 50.0, 40, 8);

    const int nq = 301;
    const double L = 15.0;
    const double dq = 2.0 * L / (nq - 1);
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nq, nq);
    std::vector<double> qs(nq);
    for (int i = 0; i < nq; ++i) qs[i] = -L + i * dq;

    for (int i = 0; i < nq; ++i)
        for (int j = 0; j < nq; ++j) K(i, j) = m.bound(qs[i]) * m.bound(qs[j]);
    for (Eigen::Index k = 0; k < grid->nodes.size(); ++k) {
        const double w = grid->nodes[k];
        const double wt = grid->weights[k];
        Eigen::VectorXd ev(nq), od(nq);
        for (int i = 0; i < nq; ++i) {
            ev[i] = m.even(w, qs[i]);
            od[i] = m.odd(w, qs[i]);
        }
        K.noalias() += wt * (ev * ev.transpose() + od * od.transpose());
    }

    double total = 0.0, off = 0.0;
    for (int i = 0; i < nq; ++i)
        for (int j = 0; j < nq; ++j) {
            const double v = K(i, j) * K(i, j);
            total += v;
            if (std::abs(qs[i] - qs[j]) > 8.0) off += v;
        }
    CHECK(off / total < 1e-2);
}
