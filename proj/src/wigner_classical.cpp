#include "declab/wigner_classical.hpp"

#include <cmath>

#include "declab/dynamics.hpp"
#include "declab/gauss_legendre.hpp"
#include "declab/parallel.hpp"

namespace declab {

namespace {

// composite Simpson weight on a uniform grid with an odd point count
double simpson_w(int i, int n) {
    if (i == 0 || i == n - 1) return 1.0 / 3.0;
    return (i % 2 == 1) ? 4.0 / 3.0 : 2.0 / 3.0;
}

// q-direction weight: Simpson split at the center node, where kernels carry
// the |q| kink of the bound and even-channel eigenfunctions (needs n % 4 == 1)
double simpson_split_w(int i, int n) {
    const int mid = (n - 1) / 2;
    if (i < mid) return simpson_w(i, mid + 1);
    if (i > mid) return simpson_w(i - mid, mid + 1);
    return 2.0 / 3.0;  // endpoint of both halves
}

// map state labels onto the model's parity channels (+1 even, -1 odd)
std::vector<int> channel_values(const QuantumNumbers& qnums) {
    require(qnums.axes() == 1, "delta-well kernels need a single parity label axis");
    std::vector<int> vals;
    for (const auto& lab : qnums.labels) {
        require(lab.size() == 1 && (lab[0] == 1 || lab[0] == -1),
                "delta-well kernels need parity labels +1 / -1");
        vals.push_back(lab[0]);
    }
    return vals;
}

struct KernelFactors {
    Eigen::MatrixXd psi_c;  // n_q x (n nodes * M)
    Eigen::MatrixXd psi_b;  // n_q x M
};

KernelFactors eigenfunction_factors(const QuantumNumbers& qnums, const SpectrumGrid& sgrid,
                                    const DeltaWellModel& model, const PhaseSpaceGrid& grid) {
    const std::vector<int> chan = channel_values(qnums);
    const auto M = static_cast<Eigen::Index>(chan.size());
    const auto n = static_cast<Eigen::Index>(sgrid.n_nodes());
    const auto nq = static_cast<Eigen::Index>(grid.n_q);

    // resolution guard: eigenfunction oscillation against the q lattice
    const double kmax = model.k_of(sgrid.omega_max);
    require(kmax * grid.dq() <= 1.0,
            "position kernel: spectral content beyond the grid resolution "
            "(k_max * dq > 1; refine n_q or lower omega_max)");

    KernelFactors f;
    f.psi_c.resize(nq, n * M);
    f.psi_b.resize(nq, M);
    parallel_for(static_cast<std::size_t>(nq), [&](std::size_t i) {
        const double q = grid.q_at(static_cast<int>(i));
        for (Eigen::Index m = 0; m < M; ++m)
            f.psi_b(static_cast<Eigen::Index>(i), m) =
                model.bound_eval(chan[static_cast<std::size_t>(m)], q);
        for (Eigen::Index k = 0; k < n; ++k) {
            const double w = sgrid.nodes[k];
            for (Eigen::Index m = 0; m < M; ++m)
                f.psi_c(static_cast<Eigen::Index>(i), k * M + m) =
                    model.continuum_eval(w, chan[static_cast<std::size_t>(m)], q);
        }
    });
    return f;
}

double relative_boundary_level(const Eigen::MatrixXcd& K, const PhaseSpaceGrid& grid) {
    const int nq = grid.n_q;
    const int J = grid.lambda_steps();
    double peak = K.cwiseAbs().maxCoeff();
    if (peak == 0.0) return 0.0;

    // each row's strip is truncated either by the lambda range or by the grid
    // edge; the kernel must have decayed at whichever endpoint applies
    double edge = 0.0;
    for (int i = 0; i < nq; ++i) {
        const int Ji = std::min({J, i, nq - 1 - i});
        edge = std::max(edge, std::abs(K(i - Ji, i + Ji)));
    }
    return edge / peak;
}

constexpr double kKernelDecayTol = 1e-8;
constexpr double kWindowSpread = 8.0;  // sigma = lambda_half / spread

// shared strip transform: prefactor * sum_j G(l_j) K(i-j, i+j) e^{2 i l_j p / hbar} dl
Eigen::MatrixXd strip_transform(const Eigen::MatrixXcd& K, const PhaseSpaceGrid& grid,
                                double prefactor, double window_sigma, double& max_imag) {
    const int nq = grid.n_q;
    const int np = grid.n_p;
    const int J = grid.lambda_steps();
    const double dl = grid.dq();

    // phase table: rows j = -J..J, cols p
    Eigen::MatrixXcd phases(2 * J + 1, np);
    for (int j = -J; j <= J; ++j) {
        const double l = j * dl;
        const double win = (window_sigma > 0.0)
                               ? std::exp(-0.5 * (l / window_sigma) * (l / window_sigma))
                               : 1.0;
        for (int m = 0; m < np; ++m)
            phases(j + J, m) = win * std::exp(Complex(0.0, 2.0 * l * grid.p_at(m) / grid.hbar));
    }

    Eigen::MatrixXd W(nq, np);
    std::vector<double> imag_rows(static_cast<std::size_t>(nq), 0.0);
    parallel_for(static_cast<std::size_t>(nq), [&](std::size_t ii) {
        const int i = static_cast<int>(ii);
        // symmetric strip, forced to an even step count so the split-Simpson
        // rule puts a panel boundary on the lambda = 0 cusp of bound and
        // even-channel kernels
        int Ji = std::min({J, i, nq - 1 - i});
        Ji -= Ji % 2;
        Eigen::VectorXcd strip(2 * Ji + 1);
        for (int j = -Ji; j <= Ji; ++j)
            strip[j + Ji] = simpson_split_w(j + Ji, 2 * Ji + 1) * K(i - j, i + j);
        const Eigen::RowVectorXcd row =
            strip.transpose() * phases.middleRows(J - Ji, 2 * Ji + 1);
        W.row(i) = prefactor * dl * row.real();
        imag_rows[ii] = prefactor * dl * row.imag().cwiseAbs().maxCoeff();
    });
    max_imag = 0.0;
    for (double v : imag_rows) max_imag = std::max(max_imag, v);
    return W;
}

Eigen::MatrixXd gradient_q(const Eigen::MatrixXd& W, double dq) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(W.rows(), W.cols());
    for (Eigen::Index i = 2; i + 2 < W.rows(); ++i)
        g.row(i) = (-W.row(i + 2) + 8.0 * W.row(i + 1) - 8.0 * W.row(i - 1) + W.row(i - 2)) /
                   (12.0 * dq);
    return g;
}

// masked L2 norm: excludes |q| < q_cut (the potential's footprint), the
// finite-difference border, and the outer band |q| > q_half - lambda_half/2
// where the grid edge truncates the transform strips below convergence
double masked_l2(const Eigen::MatrixXd& A, const PhaseSpaceGrid& grid, double q_cut) {
    const double q_outer = grid.q_half - 0.5 * grid.lambda_half;
    double acc = 0.0;
    for (int i = 3; i + 3 < grid.n_q; ++i) {
        const double q = std::abs(grid.q_at(i));
        if (q < q_cut || q > q_outer) continue;
        for (int j = 3; j + 3 < grid.n_p; ++j) acc += A(i, j) * A(i, j);
    }
    return std::sqrt(acc * grid.dq() * grid.dp());
}

} // namespace

// ------------------------------------------------------------- PhaseSpaceGrid

void PhaseSpaceGrid::validate() const {
    require(n_q >= 17 && n_p >= 17, "PhaseSpaceGrid: need at least 17 points per axis");
    require(n_q % 4 == 1, "PhaseSpaceGrid: n_q must be 1 mod 4 (split-Simpson quadrature "
                          "with a center node at q = 0)");
    require(n_p % 2 == 1, "PhaseSpaceGrid: n_p must be odd (Simpson quadrature)");
    require(q_half > 0.0 && p_half > 0.0 && hbar > 0.0, "PhaseSpaceGrid: extents and hbar must be positive");
    require(lambda_half > 0.0 && lambda_half <= 2.0 * q_half,
            "PhaseSpaceGrid: lambda range must be positive and <= 2L");
}

// ------------------------------------------------------------- kernel builders

// auxiliary momentum-uniform quadrature for the diagonal continuum block of
// observable kernels. Eigenfunctions oscillate like e^{i k(w) s} with
// dk/dw -> infinity at the spectral bottom, so profiles that do not vanish
// there (the identity, H) cannot be integrated on the energy grid at large
// |s|; resampling the smooth diagonal profile onto panels uniform in k keeps
// the oscillation resolved everywhere. State kernels never take this path
// (their validated profiles vanish at the spectral edges).
struct MomentumQuadrature {
    Eigen::VectorXd omega;    // node energies
    Eigen::VectorXd weight;   // d-omega weights (k dk, hbar^2 factor included)
    Eigen::MatrixXd resample; // node-samples -> auxiliary samples
};

MomentumQuadrature momentum_quadrature(const SpectrumGrid& sgrid, const DeltaWellModel& model,
                                       const PhaseSpaceGrid& grid) {
    const double k_max = model.k_of(sgrid.omega_max);
    const double span = 2.0 * (grid.q_half + grid.lambda_half);
    const int order = 10;
    const int panels = std::max(8, static_cast<int>(std::ceil(k_max * span / 5.0)));
    const GaussLegendreRule ref = gauss_legendre(order);

    MomentumQuadrature out;
    const int naux = panels * order;
    out.omega.resize(naux);
    out.weight.resize(naux);
    for (int p = 0; p < panels; ++p) {
        const double a = k_max * p / panels;
        const double b = k_max * (p + 1) / panels;
        for (int j = 0; j < order; ++j) {
            const double kk = 0.5 * (a + b) + 0.5 * (b - a) * ref.nodes[static_cast<std::size_t>(j)];
            const int idx = p * order + j;
            out.omega[idx] = 0.5 * kk * kk * model.hbar * model.hbar;
            // d omega = hbar^2 k dk
            out.weight[idx] = 0.5 * (b - a) * ref.weights[static_cast<std::size_t>(j)] *
                              model.hbar * model.hbar * kk;
        }
    }

    // per-panel barycentric interpolation from the energy grid nodes
    const int sorder = sgrid.panel_order;
    const GaussLegendreRule snodes = gauss_legendre(sorder);
    const std::vector<double> bw = barycentric_weights(snodes.nodes);
    out.resample = Eigen::MatrixXd::Zero(naux, static_cast<Eigen::Index>(sgrid.n_nodes()));
    for (int i = 0; i < naux; ++i) {
        const double w = std::min(out.omega[i], sgrid.omega_max * (1.0 - 1e-12));
        auto panel = static_cast<std::size_t>(w / (sgrid.omega_max / static_cast<double>(sgrid.n_panels())));
        panel = std::min(panel, sgrid.n_panels() - 1);
        const double a = sgrid.panels[panel];
        const double b = sgrid.panels[panel + 1];
        const double x = (2.0 * w - a - b) / (b - a);
        int hit = -1;
        for (int j = 0; j < sorder; ++j)
            if (std::abs(x - snodes.nodes[static_cast<std::size_t>(j)]) < 1e-14) hit = j;
        const auto base = static_cast<Eigen::Index>(panel) * sorder;
        if (hit >= 0) {
            out.resample(i, base + hit) = 1.0;
            continue;
        }
        double denom = 0.0;
        for (int j = 0; j < sorder; ++j)
            denom += bw[static_cast<std::size_t>(j)] / (x - snodes.nodes[static_cast<std::size_t>(j)]);
        for (int j = 0; j < sorder; ++j)
            out.resample(i, base + j) =
                (bw[static_cast<std::size_t>(j)] / (x - snodes.nodes[static_cast<std::size_t>(j)])) / denom;
    }
    return out;
}

PositionKernel kernel_from_blocks(const ComponentBlocks& blocks, const QuantumNumbers& qnums,
                                  const SpectrumGrid& sgrid, const DeltaWellModel& model,
                                  const PhaseSpaceGrid& grid, bool include_diagonal) {
    grid.validate();
    const KernelFactors f = eigenfunction_factors(qnums, sgrid, model, grid);
    const auto M = static_cast<Eigen::Index>(qnums.count());
    const auto n = static_cast<Eigen::Index>(sgrid.n_nodes());

    // weighted coefficient matrices (quadrature weights folded in)
    Eigen::VectorXd wv(n * M);
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index m = 0; m < M; ++m) wv[k * M + m] = sgrid.weights[k];

    Eigen::MatrixXcd Ccc = blocks.cont_cont;
    Ccc = wv.asDiagonal() * Ccc * wv.asDiagonal();

    Eigen::MatrixXcd Ccb(n * M, M);   // continuum-bound cross, weights on the continuum index
    Eigen::MatrixXcd Cbc(M, n * M);
    for (Eigen::Index k = 0; k < n; ++k) {
        Ccb.middleRows(k * M, M) = sgrid.weights[k] * blocks.cont_bound[static_cast<std::size_t>(k)];
        Cbc.middleCols(k * M, M) = sgrid.weights[k] * blocks.bound_cont[static_cast<std::size_t>(k)];
    }

    const Eigen::MatrixXcd psi_c = f.psi_c.cast<Complex>();
    const Eigen::MatrixXcd psi_b = f.psi_b.cast<Complex>();

    PositionKernel out;
    out.K = psi_c * Ccc * psi_c.transpose();
    out.K.noalias() += psi_c * Ccb * psi_b.transpose();
    out.K.noalias() += psi_b * Cbc * psi_c.transpose();
    out.K.noalias() += psi_b * blocks.bound * psi_b.transpose();

    if (include_diagonal) {
        // diagonal continuum block on the momentum-resampled quadrature
        const MomentumQuadrature mq = momentum_quadrature(sgrid, model, grid);
        const auto naux = mq.omega.size();
        const std::vector<int> chan = channel_values(qnums);
        Eigen::MatrixXd psi_aux(static_cast<Eigen::Index>(grid.n_q), naux * M);
        parallel_for(static_cast<std::size_t>(grid.n_q), [&](std::size_t i) {
            const double q = grid.q_at(static_cast<int>(i));
            for (Eigen::Index a = 0; a < naux; ++a)
                for (Eigen::Index m = 0; m < M; ++m)
                    psi_aux(static_cast<Eigen::Index>(i), a * M + m) =
                        model.continuum_eval(mq.omega[a], chan[static_cast<std::size_t>(m)], q);
        });
        // resample each matrix entry of the diagonal profile
        Eigen::MatrixXcd samples(n, M * M);
        for (Eigen::Index k = 0; k < n; ++k)
            for (Eigen::Index r = 0; r < M; ++r)
                for (Eigen::Index c = 0; c < M; ++c)
                    samples(k, r * M + c) = blocks.cont[static_cast<std::size_t>(k)](r, c);
        const Eigen::MatrixXcd aux = mq.resample.cast<Complex>() * samples;

        // block-diagonal sandwich, built chunkwise: Y = psi * blkdiag(w_a aux_a)
        const Eigen::MatrixXcd psi_aux_c = psi_aux.cast<Complex>();
        Eigen::MatrixXcd Y(psi_aux_c.rows(), naux * M);
        for (Eigen::Index a = 0; a < naux; ++a) {
            Eigen::MatrixXcd block(M, M);
            for (Eigen::Index r = 0; r < M; ++r)
                for (Eigen::Index c = 0; c < M; ++c) block(r, c) = aux(a, r * M + c);
            Y.middleCols(a * M, M).noalias() =
                psi_aux_c.middleCols(a * M, M) * (mq.weight[a] * block);
        }
        out.K.noalias() += Y * psi_aux_c.transpose();
    }

    const double peak = out.K.cwiseAbs().maxCoeff();
    out.hermiticity_defect =
        peak == 0.0 ? 0.0 : (out.K - out.K.adjoint()).cwiseAbs().maxCoeff() / peak;

    double tr = 0.0;
    for (int i = 0; i < grid.n_q; ++i)
        tr += simpson_split_w(i, grid.n_q) * out.K(i, i).real();
    out.trace = tr * grid.dq();

    out.boundary_decay = relative_boundary_level(out.K, grid);
    return out;
}

PositionKernel position_kernel(const StateFn& rho, const DeltaWellModel& model,
                               const PhaseSpaceGrid& grid) {
    // the empty odd bound channel cannot hold state mass
    const std::vector<int> chan = channel_values(rho.qnums());
    for (std::size_t a = 0; a < chan.size(); ++a)
        for (std::size_t b = 0; b < chan.size(); ++b) {
            if (chan[a] == 1 && chan[b] == 1) continue;
            require(std::abs(rho.blocks().bound(static_cast<Eigen::Index>(a),
                                                static_cast<Eigen::Index>(b))) <= 1e-12,
                    "position_kernel: bound-sector mass on the odd parity channel "
                    "(the delta well has a single even bound state)");
        }
    return kernel_from_blocks(rho.blocks(), rho.qnums(), rho.grid(), model, grid,
                              /*include_diagonal=*/false);
}

// -------------------------------------------------------------- wigner_state

WignerDensity wigner_state(const PositionKernel& kernel, const PhaseSpaceGrid& grid) {
    grid.validate();
    require(kernel.K.rows() == grid.n_q && kernel.K.cols() == grid.n_q,
            "wigner_state: kernel grid mismatch");
    require(kernel.boundary_decay <= kKernelDecayTol,
            "wigner_state: kernel has not decayed at the lambda/grid boundary "
            "(enlarge lambda_half or the spatial extent)");

    WignerDensity out;
    out.W = strip_transform(kernel.K, grid, 1.0 / (M_PI * grid.hbar), 0.0,
                            out.max_imag_residue);

    double norm = 0.0;
    for (int i = 0; i < grid.n_q; ++i)
        for (int j = 0; j < grid.n_p; ++j)
            norm += simpson_split_w(i, grid.n_q) * simpson_w(j, grid.n_p) * out.W(i, j);
    out.normalization = norm * grid.dq() * grid.dp();
    return out;
}

// ---------------------------------------------------------- wigner_observable

SymbolTable wigner_observable(const ObservableFn& O, const DeltaWellModel& model,
                              const PhaseSpaceGrid& grid, LambdaWindow window) {
    grid.validate();
    const PositionKernel kernel = kernel_from_blocks(O.blocks(), O.qnums(), O.grid(), model,
                                                     grid, /*include_diagonal=*/true);
    // Off computes the bare truncated transform: pointwise values then carry
    // truncation ringing, but pairings against decayed state kernels stay
    // clean, so no validation is imposed in that mode.
    bool use_window = false;
    switch (window) {
        case LambdaWindow::On: use_window = true; break;
        case LambdaWindow::Off: use_window = false; break;
        case LambdaWindow::Auto: use_window = kernel.boundary_decay > kKernelDecayTol; break;
    }

    SymbolTable out;
    out.window_applied = use_window;
    out.window_sigma = use_window ? grid.lambda_half / kWindowSpread : 0.0;
    // observable convention: offsets l/2, phase e^{i l p / hbar}; substituting
    // l = 2u gives prefactor 2 on the shared strip
    out.W = strip_transform(kernel.K, grid, 2.0, out.window_sigma, out.max_imag_residue);
    return out;
}

double phase_space_pairing(const WignerDensity& W, const SymbolTable& OW,
                           const PhaseSpaceGrid& grid) {
    require(W.W.rows() == OW.W.rows() && W.W.cols() == OW.W.cols(),
            "phase_space_pairing: grid mismatch");
    double acc = 0.0;
    for (int i = 0; i < grid.n_q; ++i)
        for (int j = 0; j < grid.n_p; ++j)
            acc += simpson_split_w(i, grid.n_q) * simpson_w(j, grid.n_p) * W.W(i, j) * OW.W(i, j);
    return acc * grid.dq() * grid.dp();
}

// ------------------------------------------------------- hbar-scaling reports

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, "fit_loglog_slope: need >= 2 points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        require(x[i] > 0.0 && y[i] > 0.0, "fit_loglog_slope: values must be positive");
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        num += dx * (std::log(y[i]) - my);
        den += dx * dx;
    }
    return num / den;
}

ScalingReport moyal_vs_poisson_residual(const StateFn& rho, const DeltaWellModel& model,
                                        const PhaseSpaceGrid& grid,
                                        const std::vector<double>& hbar_list,
                                        double q_cut) {
    require(!hbar_list.empty(), "moyal_vs_poisson_residual: empty hbar list");
    ScalingReport rep;

    for (double h : hbar_list) {
        const DeltaWellModel model_h = deltawell_model(model.g, h);
        const PhaseSpaceGrid grid_h = grid.with_hbar(h);

        const PositionKernel k_rho = position_kernel(rho, model_h, grid_h);
        const WignerDensity w_rho = wigner_state(k_rho, grid_h);

        // quantum side: von-Neumann-normalized generator (-1/hbar) applied to
        // the phase-rate blocks, then transformed
        StateDerivative drho = liouvillian_apply(rho);
        const Complex scale(-1.0 / h, 0.0);
        drho.blocks.cont_cont *= scale;
        for (auto& m : drho.blocks.cont_bound) m *= scale;
        for (auto& m : drho.blocks.bound_cont) m *= scale;
        const PositionKernel k_gen = kernel_from_blocks(drho.blocks, rho.qnums(), rho.grid(),
                                                        model_h, grid_h, false);
        double imag = 0.0;
        const Eigen::MatrixXd Q =
            strip_transform(k_gen.K, grid_h, 1.0 / (M_PI * h), 0.0, imag);

        // classical side: {H^W, rho^W} by centered differences. The exact
        // classical symbol of the model is p^2/2 away from the origin (the
        // potential's footprint is excluded by q_cut), so the bracket reduces
        // to -p d(rho^W)/dq; the spectrally reconstructed H symbol would add
        // truncation ringing with no classical counterpart.
        const Eigen::MatrixXd dWq = gradient_q(w_rho.W, grid_h.dq());
        Eigen::MatrixXd C(grid_h.n_q, grid_h.n_p);
        for (int j = 0; j < grid_h.n_p; ++j) C.col(j) = -grid_h.p_at(j) * dWq.col(j);

        ScalingPoint pt;
        pt.hbar = h;
        pt.residual = masked_l2(Q - C, grid_h, q_cut);
        pt.reference = masked_l2(Q, grid_h, q_cut);
        rep.points.push_back(pt);
    }

    if (rep.points.size() >= 2) {
        std::vector<double> xs, ys;
        bool positive = true;
        for (const auto& p : rep.points) {
            xs.push_back(p.hbar);
            ys.push_back(p.residual);
            positive = positive && p.residual > 0.0;
        }
        if (positive) rep.slope = fit_loglog_slope(xs, ys);
    }
    return rep;
}

ScalingReport product_correspondence_residual(const ObservableFn& O1, const ObservableFn& O2,
                                              const DeltaWellModel& model,
                                              const PhaseSpaceGrid& grid,
                                              const std::vector<double>& hbar_list,
                                              double q_cut) {
    require(!hbar_list.empty(), "product_correspondence_residual: empty hbar list");
    require(O1.energy_diagonal() && O2.energy_diagonal(),
            "product_correspondence_residual: operands must be energy-diagonal");
    require(O1.n_labels() == O2.n_labels(), "product_correspondence_residual: label mismatch");

    // blockwise product of the energy-diagonal operators
    ComponentBlocks prod = ComponentBlocks::zero(O1.grid().n_nodes(), O1.n_labels());
    prod.bound = O1.blocks().bound * O2.blocks().bound;
    for (std::size_t k = 0; k < prod.cont.size(); ++k)
        prod.cont[k] = O1.blocks().cont[k] * O2.blocks().cont[k];
    const double herm =
        std::max((prod.bound - prod.bound.adjoint()).cwiseAbs().maxCoeff(),
                 [&] {
                     double d = 0.0;
                     for (const auto& m : prod.cont)
                         d = std::max(d, (m - m.adjoint()).cwiseAbs().maxCoeff());
                     return d;
                 }());
    require(herm <= 1e-10, "product_correspondence_residual: operands must commute blockwise");
    const ObservableFn O12 =
        ObservableFn::create(O1.grid_ptr(), O1.qnums_ptr(), std::move(prod), true);

    ScalingReport rep;
    for (double h : hbar_list) {
        const DeltaWellModel model_h = deltawell_model(model.g, h);
        const PhaseSpaceGrid grid_h = grid.with_hbar(h);
        const SymbolTable A = wigner_observable(O12, model_h, grid_h);
        const SymbolTable B1 = wigner_observable(O1, model_h, grid_h);
        const SymbolTable B2 = wigner_observable(O2, model_h, grid_h);
        const Eigen::MatrixXd diff = A.W - B1.W.cwiseProduct(B2.W);

        ScalingPoint pt;
        pt.hbar = h;
        pt.residual = masked_l2(diff, grid_h, q_cut);
        pt.reference = masked_l2(A.W, grid_h, q_cut);
        rep.points.push_back(pt);
    }

    if (rep.points.size() >= 2) {
        std::vector<double> xs, ys;
        bool positive = true;
        for (const auto& p : rep.points) {
            xs.push_back(p.hbar);
            ys.push_back(p.residual);
            positive = positive && p.residual > 0.0;
        }
        if (positive) rep.slope = fit_loglog_slope(xs, ys);
    }
    return rep;
}

// --------------------------------------------------------- ClassicalEnsemble

ClassicalEnsemble classical_equilibrium_density(const StateFn& rho_star_pointer,
                                                const PointerTransform& U,
                                                const DeltaWellModel& model) {
    require(rho_star_pointer.energy_diagonal(),
            "classical_equilibrium_density: state must be energy-diagonal");
    const auto& b = rho_star_pointer.blocks();
    const auto& grid = rho_star_pointer.grid();
    const std::size_t M = rho_star_pointer.n_labels();
    require(U.n_nodes() == grid.n_nodes(),
            "classical_equilibrium_density: transform/grid mismatch");
    (void)model;

    auto check_diag = [&](const Eigen::MatrixXcd& m) {
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                if (i != j)
                    require(std::abs(m(i, j)) <= kHermiticityTol,
                            "classical_equilibrium_density: state is not diagonal in the "
                            "pointer labels");
    };
    check_diag(b.bound);
    for (const auto& m : b.cont) check_diag(m);

    // one particle per populated (level, label) pair; exact zeros are dropped
    ClassicalEnsemble ens;
    ens.qnums = rho_star_pointer.qnums_ptr();
    for (std::size_t r = 0; r < M; ++r) {
        const double lam = b.bound(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r)).real();
        require(lam >= kNegativityTol,
                "classical_equilibrium_density: negative pointer weight on the bound level");
        if (lam <= 0.0) continue;
        ClassicalParticle part;
        part.weight = lam;
        part.energy = grid.omega0;
        part.label = r;
        part.bound = true;
        ens.particles.push_back(part);
    }
    for (std::size_t k = 0; k < grid.n_nodes(); ++k) {
        const double w = grid.weights[static_cast<Eigen::Index>(k)];
        for (std::size_t r = 0; r < M; ++r) {
            const double lam = b.cont[k](static_cast<Eigen::Index>(r),
                                         static_cast<Eigen::Index>(r)).real();
            require(lam >= kNegativityTol,
                    "classical_equilibrium_density: negative pointer weight at a node");
            if (w * lam <= 0.0) continue;
            ClassicalParticle part;
            part.weight = w * lam;
            part.energy = grid.nodes[static_cast<Eigen::Index>(k)];
            part.label = r;
            part.bound = false;
            ens.particles.push_back(part);
        }
    }
    for (const auto& p : ens.particles) ens.total_weight += p.weight;
    return ens;
}

MomentTable classical_moments(const ClassicalEnsemble& ens, MomentSelector which, int n) {
    require(n >= 0, "classical_moments: order must be >= 0");
    MomentTable table;
    table.per_particle.reserve(ens.particles.size());
    for (const auto& part : ens.particles) {
        double base;
        if (std::holds_alternative<HamiltonianMoment>(which)) {
            base = part.energy;
        } else {
            base = ens.pointer_symbol(part, std::get<std::size_t>(which));
        }
        double m = 1.0;
        for (int i = 0; i < n; ++i) m *= base;
        table.per_particle.push_back(m);
        table.aggregate += part.weight * m;
    }
    return table;
}

} // namespace declab
