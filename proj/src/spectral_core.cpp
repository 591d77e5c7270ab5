#include "declab/spectral_core.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "declab/gauss_legendre.hpp"

namespace declab {

namespace {

double max_abs(const Eigen::MatrixXcd& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

void check_shapes(const SpectrumGrid& grid, const QuantumNumbers& qnums,
                  const ComponentBlocks& b, const char* what) {
    const auto M = static_cast<Eigen::Index>(qnums.count());
    const auto n = static_cast<Eigen::Index>(grid.n_nodes());
    require(b.bound.rows() == M && b.bound.cols() == M,
            std::string(what) + ": bound block shape mismatch");
    require(static_cast<Eigen::Index>(b.cont.size()) == n &&
            static_cast<Eigen::Index>(b.cont_bound.size()) == n &&
            static_cast<Eigen::Index>(b.bound_cont.size()) == n,
            std::string(what) + ": per-node block count mismatch");
    for (Eigen::Index k = 0; k < n; ++k) {
        require(b.cont[k].rows() == M && b.cont[k].cols() == M &&
                b.cont_bound[k].rows() == M && b.cont_bound[k].cols() == M &&
                b.bound_cont[k].rows() == M && b.bound_cont[k].cols() == M,
                std::string(what) + ": node block shape mismatch");
    }
    require(b.cont_cont.rows() == n * M && b.cont_cont.cols() == n * M,
            std::string(what) + ": double-continuum block shape mismatch");
}

// largest violation of the hermiticity relations shared by valid states and
// self-adjoint observables
double hermiticity_defect_of(const ComponentBlocks& b, std::size_t M) {
    double d = max_abs(b.bound - b.bound.adjoint());
    for (std::size_t k = 0; k < b.cont.size(); ++k) {
        d = std::max(d, max_abs(b.cont[k] - b.cont[k].adjoint()));
        d = std::max(d, max_abs(b.cont_bound[k] - b.bound_cont[k].adjoint()));
    }
    d = std::max(d, max_abs(b.cont_cont - b.cont_cont.adjoint()));
    (void)M;
    return d;
}

void check_same_layout(const StateFn& rho, const ObservableFn& O) {
    require(rho.grid_ptr().get() == O.grid_ptr().get() ||
                (rho.grid().n_nodes() == O.grid().n_nodes() &&
                 rho.grid().omega0 == O.grid().omega0 &&
                 rho.grid().nodes == O.grid().nodes),
            "dual_pairing: grid mismatch");
    require(rho.n_labels() == O.n_labels(), "dual_pairing: label set mismatch");
}

Complex pairing_sum(const ComponentBlocks& s, const ComponentBlocks& o,
                    const SpectrumGrid& grid, std::size_t M) {
    Complex acc = (s.bound.conjugate().cwiseProduct(o.bound)).sum();
    const std::size_t n = grid.n_nodes();
    for (std::size_t k = 0; k < n; ++k) {
        const double w = grid.weights[static_cast<Eigen::Index>(k)];
        acc += w * (s.cont[k].conjugate().cwiseProduct(o.cont[k])).sum();
        acc += w * (s.cont_bound[k].conjugate().cwiseProduct(o.cont_bound[k])).sum();
        acc += w * (s.bound_cont[k].conjugate().cwiseProduct(o.bound_cont[k])).sum();
    }
    // double-continuum term: weight w_k w_l per node pair
    for (std::size_t k = 0; k < n; ++k) {
        const double wk = grid.weights[static_cast<Eigen::Index>(k)];
        for (std::size_t l = 0; l < n; ++l) {
            const double wl = grid.weights[static_cast<Eigen::Index>(l)];
            acc += wk * wl * (s.cc(k, l, M).conjugate().cwiseProduct(o.cc(k, l, M))).sum();
        }
    }
    return acc;
}

bool blocks_energy_diagonal(const ComponentBlocks& b) {
    for (const auto& m : b.cont_bound)
        if (max_abs(m) != 0.0) return false;
    for (const auto& m : b.bound_cont)
        if (max_abs(m) != 0.0) return false;
    return max_abs(b.cont_cont) == 0.0;
}

Eigen::MatrixXcd matrix_power(const Eigen::MatrixXcd& A, int n) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Identity(A.rows(), A.cols());
    for (int i = 0; i < n; ++i) acc = acc * A;
    return acc;
}

} // namespace

// --------------------------------------------------------------- SpectrumGrid

double SpectrumGrid::max_panel_width() const {
    double w = 0.0;
    for (std::size_t i = 0; i + 1 < panels.size(); ++i)
        w = std::max(w, panels[i + 1] - panels[i]);
    return w;
}

GridPtr make_spectrum_grid(double omega0, double omega_max, int n_panels, int panel_order) {
    require(std::isfinite(omega0) && std::isfinite(omega_max), "make_spectrum_grid: non-finite input");
    require(omega0 < 0.0, "make_spectrum_grid: omega0 must be negative");
    require(omega_max > 0.0, "make_spectrum_grid: omega_max must be positive");
    require(n_panels >= 1, "make_spectrum_grid: n_panels must be >= 1");
    require(panel_order >= 2, "make_spectrum_grid: panel_order must be >= 2");

    const GaussLegendreRule ref = gauss_legendre(panel_order);
    auto grid = std::make_shared<SpectrumGrid>();
    grid->omega0 = omega0;
    grid->omega_max = omega_max;
    grid->panel_order = panel_order;
    grid->panels.resize(static_cast<std::size_t>(n_panels) + 1);
    for (int p = 0; p <= n_panels; ++p)
        grid->panels[static_cast<std::size_t>(p)] = omega_max * p / n_panels;

    const std::size_t n = static_cast<std::size_t>(n_panels) * static_cast<std::size_t>(panel_order);
    grid->nodes.resize(static_cast<Eigen::Index>(n));
    grid->weights.resize(static_cast<Eigen::Index>(n));
    std::size_t idx = 0;
    for (int p = 0; p < n_panels; ++p) {
        const double a = grid->panels[static_cast<std::size_t>(p)];
        const double b = grid->panels[static_cast<std::size_t>(p) + 1];
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        for (int j = 0; j < panel_order; ++j, ++idx) {
            grid->nodes[static_cast<Eigen::Index>(idx)] = mid + half * ref.nodes[static_cast<std::size_t>(j)];
            grid->weights[static_cast<Eigen::Index>(idx)] = half * ref.weights[static_cast<std::size_t>(j)];
        }
    }
    return grid;
}

// ------------------------------------------------------------- QuantumNumbers

QuantumNumbers QuantumNumbers::single_axis(std::vector<int> values) {
    require(!values.empty(), "QuantumNumbers: empty axis");
    std::set<int> uniq(values.begin(), values.end());
    require(uniq.size() == values.size(), "QuantumNumbers: duplicate labels");
    QuantumNumbers q;
    q.axis_sizes = {static_cast<int>(values.size())};
    for (int v : values) q.labels.push_back({v});
    return q;
}

QuantumNumbers QuantumNumbers::product(const std::vector<std::vector<int>>& axes) {
    require(!axes.empty(), "QuantumNumbers: no axes");
    QuantumNumbers q;
    q.labels = {{}};
    for (const auto& axis : axes) {
        require(!axis.empty(), "QuantumNumbers: empty axis");
        require(std::set<int>(axis.begin(), axis.end()).size() == axis.size(),
                "QuantumNumbers: duplicate labels on an axis");
        q.axis_sizes.push_back(static_cast<int>(axis.size()));
        std::vector<std::vector<int>> next;
        next.reserve(q.labels.size() * axis.size());
        for (const auto& prefix : q.labels)
            for (int v : axis) {
                auto lab = prefix;
                lab.push_back(v);
                next.push_back(std::move(lab));
            }
        q.labels = std::move(next);
    }
    return q;
}

// ------------------------------------------------------------ component blocks

ComponentBlocks ComponentBlocks::zero(std::size_t n_nodes, std::size_t n_labels) {
    const auto M = static_cast<Eigen::Index>(n_labels);
    const auto n = static_cast<Eigen::Index>(n_nodes);
    ComponentBlocks b;
    b.bound = Eigen::MatrixXcd::Zero(M, M);
    b.cont.assign(n_nodes, Eigen::MatrixXcd::Zero(M, M));
    b.cont_bound.assign(n_nodes, Eigen::MatrixXcd::Zero(M, M));
    b.bound_cont.assign(n_nodes, Eigen::MatrixXcd::Zero(M, M));
    b.cont_cont = Eigen::MatrixXcd::Zero(n * M, n * M);
    return b;
}

// ---------------------------------------------------------------- ObservableFn

ObservableFn ObservableFn::create(GridPtr grid, QnumPtr qnums, ComponentBlocks blocks,
                                  bool self_adjoint) {
    require(grid != nullptr && qnums != nullptr, "ObservableFn: null grid/qnums");
    check_shapes(*grid, *qnums, blocks, "ObservableFn");
    ObservableFn O(std::move(grid), std::move(qnums), std::move(blocks), self_adjoint);
    if (self_adjoint) {
        require(O.self_adjointness_defect() <= kHermiticityTol,
                "ObservableFn: self-adjointness violated beyond 1e-12");
    }
    return O;
}

bool ObservableFn::energy_diagonal() const { return blocks_energy_diagonal(blocks_); }

double ObservableFn::self_adjointness_defect() const {
    return hermiticity_defect_of(blocks_, n_labels());
}

// -------------------------------------------------------------------- StateFn

StateFn StateFn::create(GridPtr grid, QnumPtr qnums, ComponentBlocks blocks) {
    require(grid != nullptr && qnums != nullptr, "StateFn: null grid/qnums");
    check_shapes(*grid, *qnums, blocks, "StateFn");
    const double defect = hermiticity_defect_of(blocks, qnums->count());
    require(defect <= kHermiticityTol,
            "StateFn: hermiticity relations violated beyond 1e-12 "
            "(use symmetrize() on intended-Hermitian data)");
    return StateFn(std::move(grid), std::move(qnums), std::move(blocks));
}

StateFn StateFn::unchecked(GridPtr grid, QnumPtr qnums, ComponentBlocks blocks) {
    require(grid != nullptr && qnums != nullptr, "StateFn: null grid/qnums");
    check_shapes(*grid, *qnums, blocks, "StateFn");
    return StateFn(std::move(grid), std::move(qnums), std::move(blocks));
}

bool StateFn::energy_diagonal() const { return blocks_energy_diagonal(blocks_); }

double StateFn::total_mass() const {
    double mass = blocks_.bound.diagonal().real().sum();
    for (std::size_t k = 0; k < grid_->n_nodes(); ++k)
        mass += grid_->weights[static_cast<Eigen::Index>(k)] *
                blocks_.cont[k].diagonal().real().sum();
    return mass;
}

// ----------------------------------------------------------- validation

ValidationReport validate_state(const StateFn& rho) {
    const auto& b = rho.blocks();
    ValidationReport rep;
    rep.hermiticity_defect = hermiticity_defect_of(b, rho.n_labels());

    double most_negative = 0.0;
    auto scan_diag = [&most_negative](const Eigen::MatrixXcd& m) {
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            most_negative = std::min(most_negative, m(i, i).real());
    };
    scan_diag(b.bound);
    for (const auto& m : b.cont) scan_diag(m);
    rep.negativity_defect = most_negative;

    rep.normalization_defect = std::abs(rho.total_mass() - 1.0);

    rep.hermiticity_pass = rep.hermiticity_defect <= kHermiticityTol;
    rep.negativity_pass = rep.negativity_defect >= kNegativityTol;
    rep.normalization_pass = rep.normalization_defect <= kNormalizationTol;
    return rep;
}

StateFn symmetrize(const StateFn& rho) {
    ComponentBlocks b = rho.blocks();
    b.bound = 0.5 * (b.bound + b.bound.adjoint()).eval();
    for (std::size_t k = 0; k < b.cont.size(); ++k) {
        b.cont[k] = 0.5 * (b.cont[k] + b.cont[k].adjoint()).eval();
        const Eigen::MatrixXcd cb = 0.5 * (b.cont_bound[k] + b.bound_cont[k].adjoint());
        b.cont_bound[k] = cb;
        b.bound_cont[k] = cb.adjoint();
    }
    b.cont_cont = 0.5 * (b.cont_cont + b.cont_cont.adjoint()).eval();
    return StateFn::create(rho.grid_ptr(), rho.qnums_ptr(), std::move(b));
}

// ------------------------------------------------------------------ operations

ObservableFn identity_observable(GridPtr grid, QnumPtr qnums) {
    const std::size_t M = qnums->count();
    ComponentBlocks b = ComponentBlocks::zero(grid->n_nodes(), M);
    b.bound = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));
    for (auto& m : b.cont) m = b.bound;
    return ObservableFn::create(std::move(grid), std::move(qnums), std::move(b), true);
}

ObservableFn hamiltonian_observable(GridPtr grid, QnumPtr qnums) {
    const std::size_t M = qnums->count();
    const auto Mi = static_cast<Eigen::Index>(M);
    ComponentBlocks b = ComponentBlocks::zero(grid->n_nodes(), M);
    b.bound = grid->omega0 * Eigen::MatrixXcd::Identity(Mi, Mi);
    for (std::size_t k = 0; k < grid->n_nodes(); ++k)
        b.cont[k] = grid->nodes[static_cast<Eigen::Index>(k)] * Eigen::MatrixXcd::Identity(Mi, Mi);
    return ObservableFn::create(std::move(grid), std::move(qnums), std::move(b), true);
}

ObservableFn adjoint_observable(const ObservableFn& O) {
    const auto& src = O.blocks();
    ComponentBlocks b = ComponentBlocks::zero(O.grid().n_nodes(), O.n_labels());
    b.bound = src.bound.adjoint();
    for (std::size_t k = 0; k < src.cont.size(); ++k) {
        b.cont[k] = src.cont[k].adjoint();
        b.cont_bound[k] = src.bound_cont[k].adjoint();
        b.bound_cont[k] = src.cont_bound[k].adjoint();
    }
    b.cont_cont = src.cont_cont.adjoint();
    return ObservableFn::create(O.grid_ptr(), O.qnums_ptr(), std::move(b), O.self_adjoint());
}

Complex dual_pairing(const StateFn& rho, const ObservableFn& O) {
    check_same_layout(rho, O);
    return pairing_sum(rho.blocks(), O.blocks(), rho.grid(), rho.n_labels());
}

Complex dual_pairing(const StateDerivative& drho, const ObservableFn& O) {
    require(drho.grid != nullptr, "dual_pairing: null derivative grid");
    require(drho.qnums->count() == O.n_labels(), "dual_pairing: label set mismatch");
    return pairing_sum(drho.blocks, O.blocks(), *drho.grid, drho.qnums->count());
}

ObservableFn diagonal_power(const ObservableFn& O, int n) {
    require(n >= 0, "diagonal_power: n must be >= 0");
    require(O.energy_diagonal(),
            "diagonal_power: operator has energy-off-diagonal blocks "
            "(kernel-operator composition is unsupported)");
    if (n == 0) return identity_observable(O.grid_ptr(), O.qnums_ptr());
    ComponentBlocks b = ComponentBlocks::zero(O.grid().n_nodes(), O.n_labels());
    b.bound = matrix_power(O.blocks().bound, n);
    for (std::size_t k = 0; k < b.cont.size(); ++k)
        b.cont[k] = matrix_power(O.blocks().cont[k], n);
    return ObservableFn::create(O.grid_ptr(), O.qnums_ptr(), std::move(b), O.self_adjoint());
}

// ------------------------------------------------------- profile constructors

Eigen::VectorXcd gaussian_amplitude(const SpectrumGrid& grid, double center, double width) {
    require(width > 0.0, "gaussian_amplitude: width must be positive");
    const auto n = grid.nodes.size();
    Eigen::VectorXcd f(n);
    double mass = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double x = (grid.nodes[k] - center) / (2.0 * width);
        f[k] = std::exp(-x * x);
        mass += grid.weights[k] * std::norm(f[k]);
    }
    require(mass > 0.0, "gaussian_amplitude: profile vanishes on the grid");
    f /= std::sqrt(mass);
    return f;
}

Eigen::VectorXcd gaussian_momentum_amplitude(const SpectrumGrid& grid, double k_center,
                                             double k_width) {
    require(k_width > 0.0, "gaussian_momentum_amplitude: width must be positive");
    const auto n = grid.nodes.size();
    Eigen::VectorXcd f(n);
    double mass = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double kk = std::sqrt(2.0 * grid.nodes[k]);
        const double x = (kk - k_center) / (2.0 * k_width);
        f[k] = std::exp(-x * x);
        mass += grid.weights[k] * std::norm(f[k]);
    }
    require(mass > 0.0, "gaussian_momentum_amplitude: profile vanishes on the grid");
    f /= std::sqrt(mass);
    return f;
}

double gaussian_tail_mass(const SpectrumGrid& grid, double center, double width) {
    // mass of the squared amplitude exp(-(w-center)^2 / (2 width^2)) outside
    // [0, omega_max], relative to its full-line mass
    const double lo = (0.0 - center) / (std::sqrt(2.0) * width);
    const double hi = (grid.omega_max - center) / (std::sqrt(2.0) * width);
    return 0.5 * (std::erfc(-lo) + std::erfc(hi));
}

StateFn pure_state(GridPtr grid, QnumPtr qnums,
                   const Eigen::VectorXcd& bound_amp,
                   const Eigen::MatrixXcd& cont_amp) {
    const std::size_t M = qnums->count();
    const std::size_t n = grid->n_nodes();
    require(bound_amp.size() == static_cast<Eigen::Index>(M), "pure_state: bound amplitude length");
    require(cont_amp.rows() == static_cast<Eigen::Index>(n) &&
            cont_amp.cols() == static_cast<Eigen::Index>(M),
            "pure_state: continuum amplitude shape");

    double mass = bound_amp.squaredNorm();
    for (std::size_t k = 0; k < n; ++k)
        mass += grid->weights[static_cast<Eigen::Index>(k)] * cont_amp.row(static_cast<Eigen::Index>(k)).squaredNorm();
    require(mass > 0.0, "pure_state: zero amplitude");
    const double scale = 1.0 / std::sqrt(mass);

    const Eigen::VectorXcd b = scale * bound_amp;
    const Eigen::MatrixXcd f = scale * cont_amp;

    ComponentBlocks blocks = ComponentBlocks::zero(n, M);
    blocks.bound = b * b.adjoint();
    for (std::size_t k = 0; k < n; ++k) {
        const Eigen::VectorXcd fk = f.row(static_cast<Eigen::Index>(k)).transpose();
        blocks.cont[k] = fk * fk.adjoint();
        blocks.cont_bound[k] = fk * b.adjoint();
        blocks.bound_cont[k] = b * fk.adjoint();
    }
    for (std::size_t k = 0; k < n; ++k) {
        const Eigen::VectorXcd fk = f.row(static_cast<Eigen::Index>(k)).transpose();
        for (std::size_t l = 0; l < n; ++l) {
            const Eigen::VectorXcd fl = f.row(static_cast<Eigen::Index>(l)).transpose();
            blocks.cc(k, l, M) = fk * fl.adjoint();
        }
    }
    return StateFn::create(std::move(grid), std::move(qnums), std::move(blocks));
}

StateFn diagonal_mixture_state(GridPtr grid, QnumPtr qnums,
                               const Eigen::MatrixXcd& bound_block,
                               const std::vector<Eigen::MatrixXcd>& cont_blocks) {
    const std::size_t n = grid->n_nodes();
    require(cont_blocks.size() == n, "diagonal_mixture_state: node count mismatch");
    ComponentBlocks b = ComponentBlocks::zero(n, qnums->count());
    b.bound = 0.5 * (bound_block + bound_block.adjoint());
    for (std::size_t k = 0; k < n; ++k)
        b.cont[k] = 0.5 * (cont_blocks[k] + cont_blocks[k].adjoint());

    double mass = b.bound.diagonal().real().sum();
    for (std::size_t k = 0; k < n; ++k)
        mass += grid->weights[static_cast<Eigen::Index>(k)] * b.cont[k].diagonal().real().sum();
    require(mass > 0.0, "diagonal_mixture_state: zero mass");
    b.bound /= mass;
    for (auto& m : b.cont) m /= mass;
    return StateFn::create(std::move(grid), std::move(qnums), std::move(b));
}

StateFn random_smooth_state(Prng& rng, GridPtr grid, QnumPtr qnums,
                            bool with_diagonal_mixture) {
    const std::size_t M = qnums->count();
    const std::size_t n = grid->n_nodes();
    const double wmax = grid->omega_max;

    // Gaussian-mixture amplitudes, parameters kept away from the truncation edges
    const int n_gauss = 2 + static_cast<int>(rng.next_u64() % 2);
    Eigen::MatrixXcd amp = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n),
                                                  static_cast<Eigen::Index>(M));
    for (int j = 0; j < n_gauss; ++j) {
        const double center = rng.uniform(0.2 * wmax, 0.55 * wmax);
        const double width = rng.uniform(0.03 * wmax, 0.08 * wmax);
        const Eigen::VectorXcd g = gaussian_amplitude(*grid, center, width);
        for (std::size_t m = 0; m < M; ++m)
            amp.col(static_cast<Eigen::Index>(m)) += rng.complex_normal() * g;
    }
    Eigen::VectorXcd bamp(static_cast<Eigen::Index>(M));
    for (std::size_t m = 0; m < M; ++m) bamp[static_cast<Eigen::Index>(m)] = 0.6 * rng.complex_normal();

    StateFn pure = pure_state(grid, qnums, bamp, amp);
    if (!with_diagonal_mixture) return pure;

    // mix with an energy-diagonal part so the state is not pure
    const double p_diag = rng.uniform(0.2, 0.6);
    Eigen::MatrixXcd boundb = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(M),
                                                     static_cast<Eigen::Index>(M));
    for (std::size_t m = 0; m < M; ++m)
        boundb(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)) = rng.uniform(0.0, 1.0);
    std::vector<Eigen::MatrixXcd> contb(n);
    const double center = rng.uniform(0.2 * wmax, 0.5 * wmax);
    const double width = rng.uniform(0.04 * wmax, 0.1 * wmax);
    const Eigen::VectorXcd g = gaussian_amplitude(*grid, center, width);
    for (std::size_t k = 0; k < n; ++k) {
        Eigen::MatrixXcd mk = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(M),
                                                     static_cast<Eigen::Index>(M));
        for (std::size_t m = 0; m < M; ++m)
            mk(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)) =
                std::norm(g[static_cast<Eigen::Index>(k)]) * rng.uniform(0.2, 1.0);
        contb[k] = mk;
    }
    StateFn diag = diagonal_mixture_state(grid, qnums, boundb, contb);

    ComponentBlocks mix = ComponentBlocks::zero(n, M);
    const double a = 1.0 - p_diag;
    mix.bound = a * pure.blocks().bound + p_diag * diag.blocks().bound;
    for (std::size_t k = 0; k < n; ++k) {
        mix.cont[k] = a * pure.blocks().cont[k] + p_diag * diag.blocks().cont[k];
        mix.cont_bound[k] = a * pure.blocks().cont_bound[k];
        mix.bound_cont[k] = a * pure.blocks().bound_cont[k];
    }
    mix.cont_cont = a * pure.blocks().cont_cont;
    return StateFn::create(grid, qnums, std::move(mix));
}

ObservableFn random_smooth_observable(Prng& rng, GridPtr grid, QnumPtr qnums) {
    const std::size_t M = qnums->count();
    const auto Mi = static_cast<Eigen::Index>(M);
    const std::size_t n = grid->n_nodes();
    const double wmax = grid->omega_max;

    auto random_hermitian = [&rng, Mi]() {
        Eigen::MatrixXcd A(Mi, Mi);
        for (Eigen::Index i = 0; i < Mi; ++i)
            for (Eigen::Index j = 0; j < Mi; ++j) A(i, j) = rng.complex_normal();
        return Eigen::MatrixXcd(0.5 * (A + A.adjoint()));
    };

    ComponentBlocks b = ComponentBlocks::zero(n, M);
    b.bound = random_hermitian();

    // smooth diagonal profiles: Hermitian matrix envelopes times Gaussians
    const Eigen::VectorXcd g1 = gaussian_amplitude(*grid, rng.uniform(0.2, 0.5) * wmax,
                                                   rng.uniform(0.05, 0.12) * wmax);
    const Eigen::MatrixXcd h1 = random_hermitian();
    const Eigen::MatrixXcd h2 = random_hermitian();
    for (std::size_t k = 0; k < n; ++k) {
        const double e = std::abs(g1[static_cast<Eigen::Index>(k)]);
        b.cont[k] = e * h1 + 0.3 * h2;
    }

    // smooth cross and double-continuum profiles, built Hermitian
    const Eigen::VectorXcd g2 = gaussian_amplitude(*grid, rng.uniform(0.2, 0.5) * wmax,
                                                   rng.uniform(0.05, 0.12) * wmax);
    Eigen::MatrixXcd c = Eigen::MatrixXcd(Mi, Mi);
    for (Eigen::Index i = 0; i < Mi; ++i)
        for (Eigen::Index j = 0; j < Mi; ++j) c(i, j) = rng.complex_normal();
    for (std::size_t k = 0; k < n; ++k) {
        b.cont_bound[k] = g2[static_cast<Eigen::Index>(k)] * c;
        b.bound_cont[k] = std::conj(g2[static_cast<Eigen::Index>(k)]) * c.adjoint();
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
            const Complex z = g2[static_cast<Eigen::Index>(k)] *
                              std::conj(g2[static_cast<Eigen::Index>(l)]);
            b.cc(k, l, M) = z * h1 + std::conj(z) * h1.transpose().conjugate().eval();
        }
    // symmetrize exactly
    b.cont_cont = 0.5 * (b.cont_cont + b.cont_cont.adjoint()).eval();
    return ObservableFn::create(std::move(grid), std::move(qnums), std::move(b), true);
}

} // namespace declab
