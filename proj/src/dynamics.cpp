#include "declab/dynamics.hpp"

#include <cmath>

#include "declab/parallel.hpp"

namespace declab {

namespace {

constexpr double kQuarterPi = 0.78539816339744830962;

Complex phase(double angle) { return std::exp(Complex(0.0, angle)); }

void check_plain_mode(const SpectrumGrid& grid, double t) {
    const double width = grid.max_panel_width();
    if (width * std::abs(t) <= kQuarterPi * (1.0 + 1e-12)) return;
    const int needed = static_cast<int>(std::ceil(grid.omega_max * std::abs(t) / kQuarterPi));
    throw std::runtime_error(
        "plain-mode quadrature does not resolve the oscillation at t = " + std::to_string(t) +
        ": panel width " + std::to_string(width) + " violates width*t <= pi/4; need >= " +
        std::to_string(needed) + " panels of order " + std::to_string(grid.panel_order) +
        " (or enable Filon mode)");
}

// per-node scalar contraction sum_mm' conj(s_k)odot o_k
Eigen::VectorXcd contract_nodes(const std::vector<Eigen::MatrixXcd>& s,
                                const std::vector<Eigen::MatrixXcd>& o) {
    Eigen::VectorXcd f(static_cast<Eigen::Index>(s.size()));
    for (std::size_t k = 0; k < s.size(); ++k)
        f[static_cast<Eigen::Index>(k)] = (s[k].conjugate().cwiseProduct(o[k])).sum();
    return f;
}

} // namespace

StateFn evolve_state(const StateFn& rho, double t) {
    require(std::isfinite(t), "evolve_state: non-finite time");
    const auto& grid = rho.grid();
    const std::size_t n = grid.n_nodes();
    const std::size_t M = rho.n_labels();

    ComponentBlocks b = rho.blocks();
    for (std::size_t k = 0; k < n; ++k) {
        const double wk = grid.nodes[static_cast<Eigen::Index>(k)];
        b.cont_bound[k] *= phase((wk - grid.omega0) * t);
        b.bound_cont[k] *= phase((grid.omega0 - wk) * t);
    }
    for (std::size_t k = 0; k < n; ++k) {
        const double wk = grid.nodes[static_cast<Eigen::Index>(k)];
        for (std::size_t l = 0; l < n; ++l) {
            const double wl = grid.nodes[static_cast<Eigen::Index>(l)];
            if (k == l) continue;
            b.cc(k, l, M) *= phase((wk - wl) * t);
        }
    }
    return StateFn::create(rho.grid_ptr(), rho.qnums_ptr(), std::move(b));
}

StateFn equilibrium_state(const StateFn& rho) {
    ComponentBlocks b = ComponentBlocks::zero(rho.grid().n_nodes(), rho.n_labels());
    b.bound = rho.blocks().bound;
    b.cont = rho.blocks().cont;
    return StateFn::create(rho.grid_ptr(), rho.qnums_ptr(), std::move(b));
}

bool resolution_rule_ok(const SpectrumGrid& grid, double t) {
    return grid.max_panel_width() * std::abs(t) <= kQuarterPi * (1.0 + 1e-12);
}

double expectation(const StateFn& rho, const ObservableFn& O, double t,
                   const DynamicsOptions& opts) {
    require(O.self_adjoint(), "expectation: observable must be self-adjoint");

    QuadratureMode mode = opts.mode;
    if (mode == QuadratureMode::Auto)
        mode = resolution_rule_ok(rho.grid(), t) ? QuadratureMode::Plain : QuadratureMode::Filon;

    if (mode == QuadratureMode::Plain) {
        check_plain_mode(rho.grid(), t);
        return dual_pairing(evolve_state(rho, t), O).real();
    }

    // Filon mode: stationary part plus three oscillatory integrals. The
    // pairing conjugates the state side, so the evolved phases appear
    // conjugated here.
    const auto& grid = rho.grid();
    const auto& rb = rho.blocks();
    const auto& ob = O.blocks();
    const std::size_t n = grid.n_nodes();
    const std::size_t M = rho.n_labels();

    Complex stationary = (rb.bound.conjugate().cwiseProduct(ob.bound)).sum();
    for (std::size_t k = 0; k < n; ++k)
        stationary += grid.weights[static_cast<Eigen::Index>(k)] *
                      (rb.cont[k].conjugate().cwiseProduct(ob.cont[k])).sum();

    FilonIntegrator filon(rho.grid_ptr(), FilonOptions{opts.filon_segments});

    const Eigen::VectorXcd f_cb = contract_nodes(rb.cont_bound, ob.cont_bound);
    const Eigen::VectorXcd f_bc = contract_nodes(rb.bound_cont, ob.bound_cont);
    const Complex t1 = phase(grid.omega0 * t) * filon.integrate(f_cb, -t);
    const Complex t2 = phase(-grid.omega0 * t) * filon.integrate(f_bc, t);

    // tensor rule for the double integral: inner transform in w for each w',
    // outer transform of the (smooth) inner results in w'
    Eigen::VectorXcd inner(static_cast<Eigen::Index>(n));
    Eigen::VectorXcd col(static_cast<Eigen::Index>(n));
    for (std::size_t l = 0; l < n; ++l) {
        for (std::size_t k = 0; k < n; ++k)
            col[static_cast<Eigen::Index>(k)] =
                (rb.cc(k, l, M).conjugate().cwiseProduct(ob.cc(k, l, M))).sum();
        inner[static_cast<Eigen::Index>(l)] = filon.integrate(col, -t);
    }
    const Complex t3 = filon.integrate(inner, t);

    return (stationary + t1 + t2 + t3).real();
}

double decoherence_deficit(const StateFn& rho, const ObservableFn& O, double t,
                           const DynamicsOptions& opts) {
    const double eq = dual_pairing(equilibrium_state(rho), O).real();
    return std::abs(expectation(rho, O, t, opts) - eq);
}

DecayScan decay_scan(const StateFn& rho, const ObservableFn& O,
                     const std::vector<double>& times, const DynamicsOptions& opts) {
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
        require(times[i] < times[i + 1], "decay_scan: times must be strictly increasing");

    DecayScan scan;
    scan.times = times;
    scan.values.resize(times.size());
    scan.deficits.resize(times.size());
    scan.equilibrium_value = dual_pairing(equilibrium_state(rho), O).real();

    parallel_for(times.size(), [&](std::size_t i) {
        const double v = expectation(rho, O, times[i], opts);
        scan.values[i] = v;
        scan.deficits[i] = std::abs(v - scan.equilibrium_value);
    });
    return scan;
}

StateDerivative liouvillian_apply(const StateFn& rho) {
    const auto& grid = rho.grid();
    const std::size_t n = grid.n_nodes();
    const std::size_t M = rho.n_labels();

    ComponentBlocks b = ComponentBlocks::zero(n, M);
    for (std::size_t k = 0; k < n; ++k) {
        const double wk = grid.nodes[static_cast<Eigen::Index>(k)];
        b.cont_bound[k] = Complex(0.0, wk - grid.omega0) * rho.blocks().cont_bound[k];
        b.bound_cont[k] = Complex(0.0, grid.omega0 - wk) * rho.blocks().bound_cont[k];
    }
    for (std::size_t k = 0; k < n; ++k) {
        const double wk = grid.nodes[static_cast<Eigen::Index>(k)];
        for (std::size_t l = 0; l < n; ++l) {
            const double wl = grid.nodes[static_cast<Eigen::Index>(l)];
            b.cc(k, l, M) = Complex(0.0, wk - wl) * rho.blocks().cc(k, l, M);
        }
    }
    return StateDerivative{rho.grid_ptr(), rho.qnums_ptr(), std::move(b)};
}

} // namespace declab
