#include <doctest.h>

#include <cmath>

#include "declab/config.hpp"
#include "declab/dynamics.hpp"
#include "declab/wigner_classical.hpp"

using namespace declab;

namespace {

QnumPtr parity() {
    return std::make_shared<const QuantumNumbers>(QuantumNumbers::single_axis({1, -1}));
}

// geometry for bound-sector checks: the bound kernel decays like e^{-|q|},
// so the grid must reach |q| ~ 20 for the 1e-8 boundary validation; the cusp
// at the origin demands a fine lambda step and a wide momentum window
struct BoundSetup {
    GridPtr sgrid = make_spectrum_grid(-0.5, 12.0, 64, 10);
    QnumPtr qn = parity();
    DeltaWellModel model = deltawell_model(1.0);
    PhaseSpaceGrid grid;

    BoundSetup() {
        grid.q_half = 20.0;
        grid.n_q = 801;
        grid.p_half = 8.0;
        grid.n_p = 201;
        grid.lambda_half = 16.0;
        grid.hbar = 1.0;
    }

    StateFn bound_state() const {
        Eigen::VectorXcd b(2);
        b << 1.0, 0.0;
        return pure_state(sgrid, qn,b,
                          Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(sgrid->n_nodes()), 2));
    }
};

// geometry for continuum packets: displaced away from the potential so the
// kernel clears the boundary validation and the momentum tails stay Gaussian
struct PacketSetup {
    GridPtr sgrid = make_spectrum_grid(-0.5, 18.0, 90, 10);
    QnumPtr qn = parity();
    DeltaWellModel model = deltawell_model(1.0);
    PhaseSpaceGrid grid;

    PacketSetup() {
        grid.q_half = 21.0;
        grid.n_q = 841;
        grid.p_half = 6.0;
        grid.n_p = 241;
        grid.lambda_half = 19.0;
        grid.hbar = 1.0;
    }

    StateFn displaced(double k0, double wk, double q0) const {
        return build_moving_packet(sgrid, qn, k0, wk, q0, model.g, model.hbar);
    }
};

} // namespace

TEST_CASE("pure bound state kernel is the rank-one projector") {
    const BoundSetup s;
    const StateFn rho = s.bound_state();
    const PositionKernel K = position_kernel(rho, s.model, s.grid);

    for (int i : {0, 150, 400, 650}) {
        for (int j : {40, 400, 720}) {
            const double expected = s.model.bound(s.grid.q_at(i)) * s.model.bound(s.grid.q_at(j));
            CHECK(std::abs(K.K(i, j) - Complex(expected, 0.0)) < 1e-12);
        }
    }
    CHECK(std::abs(K.trace - 1.0) < 1e-6);
    CHECK(K.hermiticity_defect < 1e-12);
    CHECK(K.boundary_decay < 1e-8);
}

TEST_CASE("bound-state density matches the transform oracle and is real") {
    const BoundSetup s;
    const PositionKernel K = position_kernel(s.bound_state(), s.model, s.grid);
    const WignerDensity W = wigner_state(K, s.grid);

    // oracle: (1/pi) int K(-l, l) e^{2 i l p} dl at q = p = 0, 1e5 intervals
    const std::size_t N = 100000;
    const double L = s.grid.lambda_half;
    const double h = 2.0 * L / static_cast<double>(N);
    double oracle = 0.0;
    for (std::size_t i = 0; i <= N; ++i) {
        const double l = -L + static_cast<double>(i) * h;
        const double f = s.model.bound(-l) * s.model.bound(l);
        oracle += (i == 0 || i == N) ? 0.5 * f : f;
    }
    oracle *= h / M_PI;

    const int iq = (s.grid.n_q - 1) / 2;
    const int ip = (s.grid.n_p - 1) / 2;
    REQUIRE(s.grid.q_at(iq) == 0.0);
    REQUIRE(s.grid.p_at(ip) == 0.0);
    CHECK(std::abs(W.W(iq, ip) - oracle) < 1e-6);
    CHECK(W.max_imag_residue < 1e-10);

    // the cusp of the bound state radiates algebraic momentum tails beyond
    // any finite window, so mass recovery saturates at the few-per-mille level
    CHECK(std::abs(W.normalization - 1.0) < 5e-3);
}

TEST_CASE("bound state pairs with H to the bound energy") {
    // the cusp demands a fine lambda step and a wide momentum window here
    BoundSetup s;
    s.grid.n_q = 1601;
    const WignerDensity W = wigner_state(position_kernel(s.bound_state(), s.model, s.grid), s.grid);
    const SymbolTable sH =
        wigner_observable(hamiltonian_observable(s.sgrid, s.qn), s.model, s.grid,
                          LambdaWindow::Off);
    const double pairing = phase_space_pairing(W, sH, s.grid);
    CHECK(std::abs(pairing - s.model.omega0) < 1e-3);
}

TEST_CASE("displaced packets keep unit trace, hermiticity, and normalization") {
    const PacketSetup s;
    const StateFn rho = s.displaced(3.0, 0.35, 7.0);
    const PositionKernel K = position_kernel(rho, s.model, s.grid);
    CHECK(K.boundary_decay < 1e-8);
    CHECK(std::abs(K.trace - 1.0) < 1e-6);
    CHECK(K.hermiticity_defect < 1e-10);

    const WignerDensity W = wigner_state(K, s.grid);
    CHECK(std::abs(W.normalization - 1.0) < 1e-6);
    CHECK(W.max_imag_residue < 1e-10);
}

TEST_CASE("odd-channel packets normalize to machine precision") {
    // the odd channel vanishes at the potential, so no kink tails at all
    const PacketSetup s;
    Eigen::MatrixXcd amp =
        Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(s.sgrid->n_nodes()), 2);
    amp.col(1) = gaussian_momentum_amplitude(*s.sgrid, 3.0, 0.3);
    const StateFn rho = pure_state(s.sgrid, s.qn, Eigen::VectorXcd::Zero(2), amp);
    const PositionKernel K = position_kernel(rho, s.model, s.grid);
    const WignerDensity W = wigner_state(K, s.grid);
    CHECK(std::abs(K.trace - 1.0) < 1e-9);
    CHECK(std::abs(W.normalization - 1.0) < 1e-9);
}

TEST_CASE("identity symbol is flat inside the resolved window") {
    // pointwise flatness holds wherever the truncated, windowed transform
    // resolves the spectrum: away from the potential region (|q| < 2,
    // truncated completeness), the regularization's mass deficit at p ~ 0
    // (width hbar / 2 sigma_lambda), the spectral edge sqrt(2 omega_max),
    // and the strip-truncated outer band
    const BoundSetup s;
    const ObservableFn I = identity_observable(s.sgrid, s.qn);
    const SymbolTable sym = wigner_observable(I, s.model, s.grid, LambdaWindow::Auto);
    CHECK(sym.window_applied);

    // far zone: the potential footprint decays like e^{-2 kappa |q|}, the
    // window's p ~ 0 mass deficit has width hbar / (2 sigma_lambda), and the
    // outer band is strip-truncated
    double worst = 0.0;
    for (int i = 0; i < s.grid.n_q; ++i) {
        const double q = s.grid.q_at(i);
        if (std::abs(q) < 9.0 || std::abs(q) > 11.0) continue;
        for (int j = 0; j < s.grid.n_p; ++j) {
            const double p = s.grid.p_at(j);
            if (std::abs(p) < 1.25 || std::abs(p) > 3.2) continue;
            worst = std::max(worst, std::abs(sym.W(i, j) - 1.0));
        }
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("hamiltonian symbol approaches the kinetic parabola away from the well") {
    const BoundSetup s;
    const ObservableFn H = hamiltonian_observable(s.sgrid, s.qn);
    const SymbolTable sym = wigner_observable(H, s.model, s.grid, LambdaWindow::Auto);
    CHECK(sym.window_applied);

    // the windowed symbol carries a uniform s_p^2/2 smoothing offset on top
    // of the kinetic parabola; the potential contributes only near q = 0
    double worst = 0.0;
    for (int i = 0; i < s.grid.n_q; ++i) {
        const double q = s.grid.q_at(i);
        if (std::abs(q) < 3.0 || std::abs(q) > 11.0) continue;
        for (int j = 0; j < s.grid.n_p; ++j) {
            const double p = s.grid.p_at(j);
            if (std::abs(p) < 1.25 || std::abs(p) > 3.2) continue;
            worst = std::max(worst, std::abs(sym.W(i, j) - 0.5 * p * p) / (1.0 + p * p));
        }
    }
    CHECK(worst < 0.05);
}

TEST_CASE("observable transform is linear") {
    auto sgrid = make_spectrum_grid(-0.5, 10.0, 16, 8);
    auto qn = parity();
    const DeltaWellModel model = deltawell_model(1.0);
    PhaseSpaceGrid grid;
    grid.q_half = 12.0;
    grid.n_q = 241;
    grid.p_half = 3.0;
    grid.n_p = 49;
    grid.lambda_half = 10.0;

    const ObservableFn I = identity_observable(sgrid, qn);
    const ObservableFn H = hamiltonian_observable(sgrid, qn);
    ComponentBlocks combo = ComponentBlocks::zero(sgrid->n_nodes(), 2);
    combo.bound = 0.5 * I.blocks().bound + 2.0 * H.blocks().bound;
    for (std::size_t k = 0; k < sgrid->n_nodes(); ++k)
        combo.cont[k] = 0.5 * I.blocks().cont[k] + 2.0 * H.blocks().cont[k];
    const ObservableFn C = ObservableFn::create(sgrid, qn, std::move(combo), true);

    const SymbolTable sI = wigner_observable(I, model, grid, LambdaWindow::On);
    const SymbolTable sH = wigner_observable(H, model, grid, LambdaWindow::On);
    const SymbolTable sC = wigner_observable(C, model, grid, LambdaWindow::On);
    CHECK((sC.W - (0.5 * sI.W + 2.0 * sH.W)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("phase-space pairings reproduce the spectral pairings") {
    const PacketSetup s;
    Prng rng(101);
    for (int rep = 0; rep < 2; ++rep) {
        const StateFn rho = s.displaced(2.95 + 0.1 * rep, 0.33 + 0.01 * rep, 6.5 + 0.5 * rep);
        const WignerDensity W = wigner_state(position_kernel(rho, s.model, s.grid), s.grid);

        const SymbolTable sI =
            wigner_observable(identity_observable(s.sgrid, s.qn), s.model, s.grid,
                              LambdaWindow::Off);
        CHECK(std::abs(phase_space_pairing(W, sI, s.grid) - 1.0) < 1e-4);

        ComponentBlocks ob = ComponentBlocks::zero(s.sgrid->n_nodes(), 2);
        const Eigen::VectorXcd prof =
            gaussian_amplitude(*s.sgrid, 4.0 + 0.5 * rep, 1.2);
        const double mix = -0.3 + 0.25 * rep;
        for (std::size_t k = 0; k < s.sgrid->n_nodes(); ++k) {
            const double v = std::abs(prof[static_cast<Eigen::Index>(k)]);
            Eigen::MatrixXcd mm(2, 2);
            mm << v, mix * v, mix * v, 0.7 * v;
            ob.cont[k] = mm;
        }
        ob.bound = 0.4 * Eigen::MatrixXcd::Identity(2, 2);
        const ObservableFn O = ObservableFn::create(s.sgrid, s.qn, std::move(ob), true);

        const double spectral = dual_pairing(rho, O).real();
        const SymbolTable sO = wigner_observable(O, s.model, s.grid, LambdaWindow::Off);
        CHECK(std::abs(phase_space_pairing(W, sO, s.grid) - spectral) < 1e-4);
    }
}

TEST_CASE("stationary states annihilate both transport sides") {
    auto sgrid = make_spectrum_grid(-0.5, 10.0, 16, 8);
    auto qn = parity();
    const DeltaWellModel model = deltawell_model(1.0);
    PhaseSpaceGrid grid;
    grid.q_half = 12.0;
    grid.n_q = 241;
    grid.p_half = 3.0;
    grid.n_p = 49;
    grid.lambda_half = 10.0;

    // purely energy-diagonal state: the generator vanishes identically and
    // the regular-sector kernel is empty, so both sides are exactly zero
    ComponentBlocks b = ComponentBlocks::zero(sgrid->n_nodes(), 2);
    const Eigen::VectorXcd prof = gaussian_amplitude(*sgrid, 2.0, 0.6);
    for (std::size_t k = 0; k < sgrid->n_nodes(); ++k)
        b.cont[k] = std::norm(prof[static_cast<Eigen::Index>(k)]) *
                    Eigen::MatrixXcd::Identity(2, 2) * 0.5;
    const StateFn diag = StateFn::create(sgrid, qn, std::move(b));

    const ScalingReport rep = moyal_vs_poisson_residual(diag, model, grid, {1.0, 0.5}, 1.0);
    for (const auto& pt : rep.points) CHECK(pt.residual < 1e-6);

    // adding an energy-diagonal piece to a packet leaves the residual unchanged
    PacketSetup ps;
    ps.grid.n_q = 421;
    ps.grid.n_p = 121;
    const StateFn packet = ps.displaced(3.0, 0.35, 7.0);
    ComponentBlocks diag2 = ComponentBlocks::zero(ps.sgrid->n_nodes(), 2);
    const Eigen::VectorXcd prof2 = gaussian_amplitude(*ps.sgrid, 4.0, 0.8);
    for (std::size_t k = 0; k < ps.sgrid->n_nodes(); ++k)
        diag2.cont[k] = std::norm(prof2[static_cast<Eigen::Index>(k)]) *
                        Eigen::MatrixXcd::Identity(2, 2) * 0.3;
    ComponentBlocks mixb = packet.blocks();
    for (std::size_t k = 0; k < ps.sgrid->n_nodes(); ++k) mixb.cont[k] += diag2.cont[k];
    const StateFn mixed = StateFn::create(ps.sgrid, ps.qn, std::move(mixb));

    const ScalingReport r1 = moyal_vs_poisson_residual(packet, ps.model, ps.grid, {1.0}, 1.0);
    const ScalingReport r2 = moyal_vs_poisson_residual(mixed, ps.model, ps.grid, {1.0}, 1.0);
    CHECK(std::abs(r1.points[0].residual - r2.points[0].residual) < 1e-8);
}

TEST_CASE("identity factor leaves the operator product exact") {
    auto sgrid = make_spectrum_grid(-0.5, 8.0, 40, 10);
    auto qn = parity();
    const DeltaWellModel model = deltawell_model(0.1);
    PhaseSpaceGrid grid;
    grid.q_half = 12.0;
    grid.n_q = 481;
    grid.p_half = 3.0;
    grid.n_p = 121;
    grid.lambda_half = 6.0;

    const ObservableFn H = hamiltonian_observable(sgrid, qn);
    const ObservableFn I = identity_observable(sgrid, qn);

    // the operator product H*I is H exactly, so its transform is bitwise the
    // H symbol; the residual against the pointwise symbol product is then
    // bounded by the identity symbol's flatness on the truncated transform
    ComponentBlocks prod = ComponentBlocks::zero(sgrid->n_nodes(), 2);
    prod.bound = H.blocks().bound * I.blocks().bound;
    for (std::size_t k = 0; k < prod.cont.size(); ++k)
        prod.cont[k] = H.blocks().cont[k] * I.blocks().cont[k];
    const ObservableFn HI = ObservableFn::create(sgrid, qn, std::move(prod), true);
    const SymbolTable sHI = wigner_observable(HI, model, grid, LambdaWindow::Auto);
    const SymbolTable sH = wigner_observable(H, model, grid, LambdaWindow::Auto);
    CHECK((sHI.W - sH.W).cwiseAbs().maxCoeff() == 0.0);

    const ScalingReport rep =
        product_correspondence_residual(H, I, model, grid, {1.0, 0.5, 0.25}, 3.0);
    for (const auto& pt : rep.points) CHECK(pt.residual < 0.03 * std::max(1.0, pt.reference));
}

TEST_CASE("classical ensemble carries exact moments and unit mass") {
    auto sgrid = make_spectrum_grid(-0.5, 10.0, 16, 8);
    auto qn = parity();
    const DeltaWellModel model = deltawell_model(1.0);

    // pure bound pointer state: a single particle of weight one
    Eigen::VectorXcd b(2);
    b << 1.0, 0.0;
    const StateFn rho_b = pure_state(sgrid, qn, b,
                                     Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(sgrid->n_nodes()), 2));
    const PointerTransform Ub = diagonalize_blocks(equilibrium_state(rho_b));
    const StateFn diag_b = transform_state(equilibrium_state(rho_b), Ub);
    const ClassicalEnsemble single = classical_equilibrium_density(diag_b, Ub, model);
    REQUIRE(single.particles.size() == 1);
    CHECK(single.particles[0].weight == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(single.particles[0].energy == doctest::Approx(sgrid->omega0));
    CHECK(single.total_weight == doctest::Approx(1.0).epsilon(1e-10));

    // mixed state: all weights nonnegative, mass one, moments exact
    Prng rng(77);
    const StateFn rho = equilibrium_state(random_smooth_state(rng, sgrid, qn));
    const PointerTransform U = diagonalize_blocks(rho);
    const StateFn diag = transform_state(rho, U);
    const ClassicalEnsemble ens = classical_equilibrium_density(diag, U, model);
    CHECK(std::abs(ens.total_weight - 1.0) < 1e-10);
    for (const auto& part : ens.particles) CHECK(part.weight >= 0.0);

    const MomentTable h1 = classical_moments(ens, HamiltonianMoment{}, 1);
    double manual = 0.0;
    for (const auto& part : ens.particles) manual += part.weight * part.energy;
    CHECK(h1.aggregate == doctest::Approx(manual).epsilon(1e-14));

    const MomentTable h0 = classical_moments(ens, HamiltonianMoment{}, 0);
    for (double v : h0.per_particle) CHECK(v == 1.0);

    const MomentTable h3 = classical_moments(ens, HamiltonianMoment{}, 3);
    for (std::size_t i = 0; i < ens.particles.size(); ++i) {
        const double x = ens.particles[i].energy;
        CHECK(h3.per_particle[i] == doctest::Approx(x * x * x).epsilon(1e-14));
    }
    const MomentTable p2 = classical_moments(ens, std::size_t{0}, 2);
    for (double v : p2.per_particle) CHECK(v == doctest::Approx(1.0));  // parity^2 = 1

    const StateFn general = random_smooth_state(rng, sgrid, qn);
    CHECK_THROWS(classical_equilibrium_density(general, U, model));
}

TEST_CASE("two-particle aggregate moment") {
    ClassicalEnsemble ens;
    ens.qnums = parity();
    ClassicalParticle a;
    a.weight = 0.5;
    a.energy = 1.0;
    a.label = 0;
    ClassicalParticle b;
    b.weight = 0.5;
    b.energy = 3.0;
    b.label = 1;
    ens.particles = {a, b};
    ens.total_weight = 1.0;
    const MomentTable m = classical_moments(ens, HamiltonianMoment{}, 1);
    CHECK(m.aggregate == doctest::Approx(2.0).epsilon(1e-15));
}
