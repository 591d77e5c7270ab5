#include <doctest.h>

#include <cmath>

#include "declab/dynamics.hpp"

using namespace declab;

namespace {

GridPtr demo_grid() { return make_spectrum_grid(-0.5, 10.0, 32, 10); }

QnumPtr one_label() {
    return std::make_shared<const QuantumNumbers>(QuantumNumbers::single_axis({1}));
}

// state with a separable double-continuum block 𝜌cc = g g^T plus the matching
// diagonal profile (single label); captures the profile as a function too
struct GaussianDemo {
    StateFn rho;
    ObservableFn obs;          // cc block identically one
    double scale;              // continuum amplitude normalization
    double center, width;
    GridPtr grid;

    double amp(double w) const {
        const double x = (w - center) / (2.0 * width);
        return scale * std::exp(-x * x);
    }
};

GaussianDemo make_demo(GridPtr grid, double center, double width, double bound_mass) {
    auto qn = one_label();
    const std::size_t n = grid->n_nodes();

    Eigen::VectorXcd bound(1);
    bound << std::sqrt(bound_mass);
    Eigen::MatrixXcd amp(static_cast<Eigen::Index>(n), 1);
    amp.col(0) = std::sqrt(1.0 - bound_mass) * gaussian_amplitude(*grid, center, width);
    GaussianDemo demo{pure_state(grid, qn, bound, amp),
                      identity_observable(grid, qn), 0.0, center, width, grid};

    // observable acting on the double-continuum block only
    ComponentBlocks ob = ComponentBlocks::zero(n, 1);
    ob.cont_cont = Eigen::MatrixXcd::Ones(static_cast<Eigen::Index>(n),
                                          static_cast<Eigen::Index>(n));
    demo.obs = ObservableFn::create(grid, qn, std::move(ob), true);

    double raw_mass = 0.0;
    for (Eigen::Index k = 0; k < grid->nodes.size(); ++k) {
        const double x = (grid->nodes[k] - center) / (2.0 * width);
        raw_mass += grid->weights[k] * std::exp(-2.0 * x * x);
    }
    demo.scale = std::sqrt((1.0 - bound_mass) / raw_mass);
    return demo;
}

// brute-force oracle of |\int g e^{i w t} dw|^2 over the truncated domain
double oscillatory_oracle(const GaussianDemo& demo, double t, std::size_t points) {
    const double h = demo.grid->omega_max / static_cast<double>(points);
    Complex acc(0.0, 0.0);
    for (std::size_t i = 0; i <= points; ++i) {
        const double w = static_cast<double>(i) * h;
        const Complex f = demo.amp(w) * std::exp(Complex(0.0, w * t));
        acc += (i == 0 || i == points) ? 0.5 * f : f;
    }
    acc *= h;
    return std::norm(acc);
}

} // namespace

TEST_CASE("evolution at t = 0 is the identity") {
    auto grid = demo_grid();
    Prng rng(9);
    auto qn = std::make_shared<const QuantumNumbers>(QuantumNumbers::single_axis({1, -1}));
    const StateFn rho = random_smooth_state(rng, grid, qn);
    const StateFn same = evolve_state(rho, 0.0);
    CHECK((same.blocks().cont_cont - rho.blocks().cont_cont).cwiseAbs().maxCoeff() == 0.0);
    CHECK((same.blocks().cont_bound[3] - rho.blocks().cont_bound[3]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("energy-diagonal states are fixed points of the evolution") {
    auto grid = demo_grid();
    Prng rng(10);
    auto qn = std::make_shared<const QuantumNumbers>(QuantumNumbers::single_axis({1, -1}));
    const StateFn rho = equilibrium_state(random_smooth_state(rng, grid, qn));
    const StateFn moved = evolve_state(rho, 17.3);
    CHECK((moved.blocks().cont_cont - rho.blocks().cont_cont).cwiseAbs().maxCoeff() == 0.0);
    CHECK((moved.blocks().bound - rho.blocks().bound).cwiseAbs().maxCoeff() == 0.0);

    // stationarity of the generator
    const StateDerivative d = liouvillian_apply(rho);
    CHECK(d.blocks.cont_cont.cwiseAbs().maxCoeff() == 0.0);
    CHECK(d.blocks.cont_bound[5].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("phase additivity of the evolution") {
    auto grid = make_spectrum_grid(-0.5, 6.0, 6, 4);
    Prng rng(11);
    auto qn = std::make_shared<const QuantumNumbers>(QuantumNumbers::single_axis({1, -1}));
    const StateFn rho = random_smooth_state(rng, grid, qn);
    const StateFn ab = evolve_state(evolve_state(rho, 0.7), 1.9);
    const StateFn direct = evolve_state(rho, 2.6);
    CHECK((ab.blocks().cont_cont - direct.blocks().cont_cont).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((ab.blocks().cont_bound[2] - direct.blocks().cont_bound[2]).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("evolution preserves validation exactly") {
    auto grid = make_spectrum_grid(-0.5, 6.0, 6, 4);
    Prng rng(12);
    auto qn = std::make_shared<const QuantumNumbers>(QuantumNumbers::single_axis({1, -1}));
    const StateFn rho = random_smooth_state(rng, grid, qn);
    const StateFn moved = evolve_state(rho, 3.21);
    const ValidationReport rep = validate_state(moved);
    CHECK(rep.pass());
    CHECK(moved.total_mass() == rho.total_mass());
}

TEST_CASE("identity expectation stays one at every time") {
    auto grid = demo_grid();
    const GaussianDemo demo = make_demo(grid, 2.0, 0.25, 0.3);
    auto qn = demo.rho.qnums_ptr();
    const ObservableFn I = identity_observable(grid, qn);
    for (double t : {0.0, 0.4, 7.0}) {
        DynamicsOptions opt;
        opt.mode = QuadratureMode::Filon;
        CHECK(std::abs(expectation(demo.rho, I, t, opt) - 1.0) < 1e-10);
    }
    DynamicsOptions plain;
    plain.mode = QuadratureMode::Plain;
    CHECK(std::abs(expectation(demo.rho, I, 0.05, plain) - 1.0) < 1e-10);
}

TEST_CASE("energy-diagonal expectation is time independent in plain mode") {
    auto grid = demo_grid();
    Prng rng(13);
    auto qn = std::make_shared<const QuantumNumbers>(QuantumNumbers::single_axis({1, -1}));
    const StateFn rho = equilibrium_state(random_smooth_state(rng, grid, qn));
    const ObservableFn H = hamiltonian_observable(grid, qn);
    DynamicsOptions plain;
    plain.mode = QuadratureMode::Plain;
    const double v0 = expectation(rho, H, 0.0, plain);
    const double v1 = expectation(rho, H, 0.02, plain);
    CHECK(v0 == v1);
}

TEST_CASE("plain mode equals the evolved pairing and enforces the resolution rule") {
    auto grid = demo_grid();
    const GaussianDemo demo = make_demo(grid, 2.0, 0.25, 0.3);
    DynamicsOptions plain;
    plain.mode = QuadratureMode::Plain;
    const double t = 0.5;
    REQUIRE(resolution_rule_ok(*grid, t));
    const double via_expectation = expectation(demo.rho, demo.obs, t, plain);
    const double via_pairing = dual_pairing(evolve_state(demo.rho, t), demo.obs).real();
    CHECK(via_expectation == via_pairing);

    CHECK_FALSE(resolution_rule_ok(*grid, 50.0));
    CHECK_THROWS_WITH_AS(expectation(demo.rho, demo.obs, 50.0, plain),
                         doctest::Contains("panels"), std::runtime_error);
}

TEST_CASE("oscillatory term tracks the brute-force oracle up to t = 50") {
    auto grid = demo_grid();
    const GaussianDemo demo = make_demo(grid, 1.0, 0.2, 0.3);
    DynamicsOptions filon;
    filon.mode = QuadratureMode::Filon;
    for (double t : {0.0, 0.8, 2.5, 10.0, 27.0, 50.0}) {
        const double computed = expectation(demo.rho, demo.obs, t, filon);
        const double oracle = oscillatory_oracle(demo, t, 1000000);
        CHECK(std::abs(computed - oracle) < 1e-8);
    }
}

TEST_CASE("deficits vanish for stationary states and decay for gaussian packets") {
    auto grid = demo_grid();
    auto qn = std::make_shared<const QuantumNumbers>(QuantumNumbers::single_axis({1, -1}));
    Prng rng(14);
    const StateFn stationary = equilibrium_state(random_smooth_state(rng, grid, qn));
    const ObservableFn H = hamiltonian_observable(grid, qn);
    for (double t : {0.0, 3.0, 80.0})
        CHECK(decoherence_deficit(stationary, H, t,
                                  DynamicsOptions{QuadratureMode::Filon, 64}) < 1e-14);

    const GaussianDemo demo = make_demo(grid, 2.0, 0.25, 0.3);
    DynamicsOptions filon{QuadratureMode::Filon, 64};
    const double d0 = decoherence_deficit(demo.rho, demo.obs, 0.0, filon);
    CHECK(d0 > 1e-3);

    // t = 0 deficit equals the full off-diagonal pairing magnitude
    const double direct =
        std::abs(dual_pairing(demo.rho, demo.obs).real() -
                 dual_pairing(equilibrium_state(demo.rho), demo.obs).real());
    CHECK(d0 == doctest::Approx(direct).epsilon(1e-9));

    // envelope: below 1e-5 of the initial value at t = 5 / sigma
    const double tf = 5.0 / 0.25;
    CHECK(decoherence_deficit(demo.rho, demo.obs, tf, filon) < 1e-5 * d0);
}

TEST_CASE("dyadic suprema of the decay scan decrease") {
    auto grid = demo_grid();
    const GaussianDemo demo = make_demo(grid, 2.0, 0.3, 0.2);
    DynamicsOptions filon{QuadratureMode::Filon, 64};
    const double T = 1.0 / 0.3;

    std::vector<double> times;
    for (int dyad = 0; dyad < 3; ++dyad)
        for (int i = 0; i < 9; ++i)
            times.push_back(T * std::pow(2.0, dyad) * (1.0 + i / 9.0));
    const DecayScan scan = decay_scan(demo.rho, demo.obs, times, filon);

    double sup[3] = {0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < scan.times.size(); ++i)
        sup[i / 9] = std::max(sup[i / 9], scan.deficits[i]);
    CHECK(sup[0] > sup[1]);
    CHECK(sup[1] > sup[2]);

    // constant observable scans to zero deficit
    const ObservableFn I = identity_observable(grid, demo.rho.qnums_ptr());
    const DecayScan flat = decay_scan(demo.rho, I, {0.5, 1.0, 2.0}, filon);
    for (double d : flat.deficits) CHECK(d < 1e-10);

    CHECK_THROWS(decay_scan(demo.rho, demo.obs, {1.0, 1.0}, filon));
}

TEST_CASE("generator pairing equals the blockwise commutator pairing") {
    // (L rho | O) = -i (rho | [H,O]) with [H,O](x,x') = (x-x') O(x,x'); the
    // -i appears because the pairing conjugates the state side while the
    // evolution carries the phases e^{i(x-x')t} as printed
    auto grid = make_spectrum_grid(-0.5, 8.0, 6, 5);
    auto qn = std::make_shared<const QuantumNumbers>(QuantumNumbers::single_axis({1, -1}));
    Prng rng(19);
    const StateFn rho = random_smooth_state(rng, grid, qn);
    const ObservableFn O = random_smooth_observable(rng, grid, qn);

    ComponentBlocks comm = ComponentBlocks::zero(grid->n_nodes(), 2);
    for (std::size_t k = 0; k < grid->n_nodes(); ++k) {
        const double wk = grid->nodes[static_cast<Eigen::Index>(k)];
        comm.cont_bound[k] = (wk - grid->omega0) * O.blocks().cont_bound[k];
        comm.bound_cont[k] = (grid->omega0 - wk) * O.blocks().bound_cont[k];
        for (std::size_t l = 0; l < grid->n_nodes(); ++l) {
            const double wl = grid->nodes[static_cast<Eigen::Index>(l)];
            comm.cc(k, l, 2) = (wk - wl) * O.blocks().cc(k, l, 2);
        }
    }
    const ObservableFn HO = ObservableFn::create(grid, qn, std::move(comm), false);

    const Complex lhs = dual_pairing(liouvillian_apply(rho), O);
    const Complex rhs = Complex(0.0, -1.0) * dual_pairing(rho, HO);
    CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("generator matches the centered difference of the expectation") {
    auto grid = demo_grid();
    const GaussianDemo demo = make_demo(grid, 2.0, 0.25, 0.3);
    const StateDerivative d = liouvillian_apply(demo.rho);
    const double rate = dual_pairing(d, demo.obs).real();

    const double h = 1e-5;
    DynamicsOptions plain{QuadratureMode::Plain, 64};
    const double fd = (expectation(demo.rho, demo.obs, h, plain) -
                       expectation(demo.rho, demo.obs, -h, plain)) /
                      (2.0 * h);
    CHECK(std::abs(fd - rate) < 1e-8);

    // the stationary projection is annihilated
    const StateDerivative dz = liouvillian_apply(equilibrium_state(demo.rho));
    CHECK(dz.blocks.cont_cont.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("equilibrium projection is idempotent and stationary") {
    auto grid = make_spectrum_grid(-0.5, 6.0, 6, 4);
    Prng rng(15);
    auto qn = std::make_shared<const QuantumNumbers>(QuantumNumbers::single_axis({1, -1}));
    const StateFn rho = random_smooth_state(rng, grid, qn);
    const StateFn eq = equilibrium_state(rho);
    const StateFn eq2 = equilibrium_state(eq);
    CHECK((eq2.blocks().bound - eq.blocks().bound).cwiseAbs().maxCoeff() == 0.0);
    CHECK(validate_state(eq).pass());
    const StateFn moved = evolve_state(eq, 11.7);
    CHECK((moved.blocks().cont_cont - eq.blocks().cont_cont).cwiseAbs().maxCoeff() == 0.0);
}
