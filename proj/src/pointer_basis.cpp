#include "declab/pointer_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace declab {

namespace {

struct EigenPairs {
    Eigen::VectorXd values;
    Eigen::MatrixXcd vectors;  // columns
};

EigenPairs hermitian_eig_descending(const Eigen::MatrixXcd& block) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(block);
    require(solver.info() == Eigen::Success, "diagonalize_blocks: eigensolver failed");
    const Eigen::Index M = block.rows();
    EigenPairs out;
    out.values.resize(M);
    out.vectors.resize(M, M);
    for (Eigen::Index i = 0; i < M; ++i) {  // ascending -> descending
        out.values[i] = solver.eigenvalues()[M - 1 - i];
        out.vectors.col(i) = solver.eigenvectors().col(M - 1 - i);
    }
    return out;
}

// make the largest-magnitude component of each column real and positive
void fix_phases(Eigen::MatrixXcd& U) {
    for (Eigen::Index c = 0; c < U.cols(); ++c) {
        Eigen::Index imax = 0;
        double best = -1.0;
        for (Eigen::Index r = 0; r < U.rows(); ++r) {
            const double a = std::abs(U(r, c));
            if (a > best + 1e-15) {
                best = a;
                imax = r;
            }
        }
        const Complex z = U(imax, c);
        if (std::abs(z) > 0.0) U.col(c) *= std::conj(z) / std::abs(z);
    }
}

// resolve eigenvalue clusters: secondary-observable diagonalization when
// provided, else deterministic ordering by dominant component index
void resolve_degeneracies(EigenPairs& ep, const Eigen::MatrixXcd* secondary,
                          double rel_tol) {
    const Eigen::Index M = ep.values.size();
    Eigen::Index start = 0;
    while (start < M) {
        Eigen::Index end = start + 1;
        const double scale = std::max(1.0, std::abs(ep.values[start]));
        while (end < M && std::abs(ep.values[end] - ep.values[start]) <= rel_tol * scale)
            ++end;
        const Eigen::Index size = end - start;
        if (size > 1) {
            if (secondary != nullptr) {
                const Eigen::MatrixXcd V = ep.vectors.middleCols(start, size);
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> sub(V.adjoint() * (*secondary) * V);
                Eigen::MatrixXcd W(size, size);
                for (Eigen::Index i = 0; i < size; ++i)  // descending secondary eigenvalue
                    W.col(i) = sub.eigenvectors().col(size - 1 - i);
                ep.vectors.middleCols(start, size) = V * W;
            } else {
                std::vector<Eigen::Index> order(static_cast<std::size_t>(size));
                std::iota(order.begin(), order.end(), 0);
                auto dominant_row = [&](Eigen::Index c) {
                    Eigen::Index imax = 0;
                    double best = -1.0;
                    for (Eigen::Index r = 0; r < M; ++r) {
                        const double a = std::abs(ep.vectors(r, start + c));
                        if (a > best + 1e-15) {
                            best = a;
                            imax = r;
                        }
                    }
                    return imax;
                };
                std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
                    return dominant_row(a) < dominant_row(b);
                });
                Eigen::MatrixXcd perm(M, size);
                Eigen::VectorXd vals(size);
                for (Eigen::Index i = 0; i < size; ++i) {
                    perm.col(i) = ep.vectors.col(start + order[static_cast<std::size_t>(i)]);
                    vals[i] = ep.values[start + order[static_cast<std::size_t>(i)]];
                }
                ep.vectors.middleCols(start, size) = perm;
                ep.values.segment(start, size) = vals;
            }
        }
        start = end;
    }
}

// greedy maximal-overlap assignment of current eigenvectors to previous slots
void track_ordering(const Eigen::MatrixXcd& prev_U, EigenPairs& cur, double threshold,
                    std::size_t node_index, double& min_overlap) {
    const Eigen::Index M = prev_U.cols();
    Eigen::MatrixXd overlap(M, M);  // |<prev_i | cur_j>|
    for (Eigen::Index i = 0; i < M; ++i)
        for (Eigen::Index j = 0; j < M; ++j)
            overlap(i, j) = std::abs((prev_U.col(i).adjoint() * cur.vectors.col(j))(0, 0));

    std::vector<Eigen::Index> assign(static_cast<std::size_t>(M), -1);
    std::vector<bool> used_row(static_cast<std::size_t>(M), false);
    std::vector<bool> used_col(static_cast<std::size_t>(M), false);
    for (Eigen::Index pick = 0; pick < M; ++pick) {
        double best = -1.0;
        Eigen::Index bi = -1, bj = -1;
        for (Eigen::Index i = 0; i < M; ++i) {
            if (used_row[static_cast<std::size_t>(i)]) continue;
            for (Eigen::Index j = 0; j < M; ++j) {
                if (used_col[static_cast<std::size_t>(j)]) continue;
                if (overlap(i, j) > best) {
                    best = overlap(i, j);
                    bi = i;
                    bj = j;
                }
            }
        }
        assign[static_cast<std::size_t>(bi)] = bj;
        used_row[static_cast<std::size_t>(bi)] = true;
        used_col[static_cast<std::size_t>(bj)] = true;
        if (best < threshold) {
            throw std::runtime_error(
                "diagonalize_blocks: eigenvector tracking failed at node " +
                std::to_string(node_index) + " (overlap " + std::to_string(best) +
                " < " + std::to_string(threshold) +
                "); refine the grid or supply a secondary observable");
        }
        min_overlap = std::min(min_overlap, best);
    }

    Eigen::MatrixXcd vec(M, M);
    Eigen::VectorXd val(M);
    for (Eigen::Index i = 0; i < M; ++i) {
        vec.col(i) = cur.vectors.col(assign[static_cast<std::size_t>(i)]);
        val[i] = cur.values[assign[static_cast<std::size_t>(i)]];
    }
    cur.vectors = vec;
    cur.values = val;
}

} // namespace

PointerTransform diagonalize_blocks(const StateFn& rho, const DiagonalizeOptions& opts) {
    const auto& b = rho.blocks();
    const std::size_t n = rho.grid().n_nodes();
    const auto M = static_cast<Eigen::Index>(rho.n_labels());

    const Eigen::MatrixXcd* sec_bound = nullptr;
    std::vector<const Eigen::MatrixXcd*> sec_cont(n, nullptr);
    if (opts.secondary.has_value()) {
        const auto& S = *opts.secondary;
        require(S.energy_diagonal(), "diagonalize_blocks: secondary observable must be energy-diagonal");
        require(S.n_labels() == rho.n_labels(), "diagonalize_blocks: secondary label mismatch");
        sec_bound = &S.blocks().bound;
        for (std::size_t k = 0; k < n; ++k) sec_cont[k] = &S.blocks().cont[k];
    }

    PointerTransform out;
    out.grid = rho.grid_ptr();
    out.cont_U.resize(n);
    out.cont_eigs.resize(static_cast<Eigen::Index>(n), M);

    // bound block: independent, descending
    {
        EigenPairs ep = hermitian_eig_descending(b.bound);
        resolve_degeneracies(ep, sec_bound, opts.degeneracy_rel_tol);
        fix_phases(ep.vectors);
        out.bound_U = ep.vectors;
        out.bound_eigs = ep.values;
    }

    // continuum: anchor at the first node, then continuity tracking
    for (std::size_t k = 0; k < n; ++k) {
        EigenPairs ep = hermitian_eig_descending(b.cont[k]);
        resolve_degeneracies(ep, sec_cont[k], opts.degeneracy_rel_tol);
        if (k > 0) track_ordering(out.cont_U[k - 1], ep, opts.overlap_threshold, k, out.min_overlap);
        fix_phases(ep.vectors);
        out.cont_U[k] = ep.vectors;
        out.cont_eigs.row(static_cast<Eigen::Index>(k)) = ep.values.transpose();
    }
    return out;
}

namespace {

ComponentBlocks conjugate_blocks(const ComponentBlocks& src, const PointerTransform& U,
                                 std::size_t n, std::size_t M) {
    ComponentBlocks b = ComponentBlocks::zero(n, M);
    b.bound = U.bound_U.adjoint() * src.bound * U.bound_U;
    for (std::size_t k = 0; k < n; ++k) {
        b.cont[k] = U.cont_U[k].adjoint() * src.cont[k] * U.cont_U[k];
        b.cont_bound[k] = U.cont_U[k].adjoint() * src.cont_bound[k] * U.bound_U;
        b.bound_cont[k] = U.bound_U.adjoint() * src.bound_cont[k] * U.cont_U[k];
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
            b.cc(k, l, M) = U.cont_U[k].adjoint() * src.cc(k, l, M) * U.cont_U[l];
    return b;
}

void check_transform_shapes(std::size_t n, std::size_t M, const PointerTransform& U,
                            const char* what) {
    require(U.cont_U.size() == n, std::string(what) + ": node count mismatch");
    require(U.bound_U.rows() == static_cast<Eigen::Index>(M) &&
            U.bound_U.cols() == static_cast<Eigen::Index>(M),
            std::string(what) + ": unitary shape mismatch");
}

} // namespace

StateFn transform_state(const StateFn& rho, const PointerTransform& U) {
    const std::size_t n = rho.grid().n_nodes();
    const std::size_t M = rho.n_labels();
    check_transform_shapes(n, M, U, "transform_state");
    return StateFn::create(rho.grid_ptr(), rho.qnums_ptr(),
                           conjugate_blocks(rho.blocks(), U, n, M));
}

ObservableFn transform_observable(const ObservableFn& O, const PointerTransform& U) {
    const std::size_t n = O.grid().n_nodes();
    const std::size_t M = O.n_labels();
    check_transform_shapes(n, M, U, "transform_observable");
    return ObservableFn::create(O.grid_ptr(), O.qnums_ptr(),
                                conjugate_blocks(O.blocks(), U, n, M), O.self_adjoint());
}

std::vector<ObservableFn> pointer_observables(const PointerTransform& U, QnumPtr qnums) {
    const std::size_t n = U.n_nodes();
    const std::size_t M = qnums->count();
    const auto Mi = static_cast<Eigen::Index>(M);
    require(U.bound_U.rows() == Mi, "pointer_observables: label count mismatch");

    require(U.grid != nullptr, "pointer_observables: transform carries no grid");
    std::vector<ObservableFn> out;
    out.reserve(qnums->axes());
    for (std::size_t axis = 0; axis < qnums->axes(); ++axis) {
        Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(Mi, Mi);
        for (std::size_t r = 0; r < M; ++r)
            D(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r)) =
                static_cast<double>(qnums->labels[r][axis]);

        ComponentBlocks b = ComponentBlocks::zero(n, M);
        b.bound = U.bound_U * D * U.bound_U.adjoint();
        b.bound = 0.5 * (b.bound + b.bound.adjoint()).eval();
        for (std::size_t k = 0; k < n; ++k) {
            b.cont[k] = U.cont_U[k] * D * U.cont_U[k].adjoint();
            b.cont[k] = 0.5 * (b.cont[k] + b.cont[k].adjoint()).eval();
        }
        out.push_back(ObservableFn::create(U.grid, qnums, std::move(b), true));
    }
    return out;
}

double moment_check(SectorSelector x, std::size_t r, const ObservableFn& O, int n) {
    require(O.energy_diagonal(), "moment_check: observable must be energy-diagonal");
    const ObservableFn On = diagonal_power(O, n);
    const auto ri = static_cast<Eigen::Index>(r);
    if (std::holds_alternative<BoundSector>(x)) {
        require(ri < On.blocks().bound.rows(), "moment_check: label out of range");
        return On.blocks().bound(ri, ri).real();
    }
    const std::size_t k = std::get<std::size_t>(x);
    require(k < On.blocks().cont.size(), "moment_check: node out of range");
    require(ri < On.blocks().cont[k].rows(), "moment_check: label out of range");
    // the co-basis functional at node k carries weight 1/w_k, which cancels
    // the quadrature weight: the pairing is the (r, r) entry itself
    return On.blocks().cont[k](ri, ri).real();
}

Complex commutator_expectation(const StateFn& rho_star, const ObservableFn& P,
                               const ObservableFn& O) {
    require(rho_star.energy_diagonal(),
            "commutator_expectation: state must be energy-diagonal");
    require(P.energy_diagonal(),
            "commutator_expectation: pointer observable must be energy-diagonal");
    const auto& sb = rho_star.blocks();
    const auto& pb = P.blocks();
    const auto& ob = O.blocks();
    const auto& grid = rho_star.grid();
    const std::size_t n = grid.n_nodes();

    auto check_diagonal = [](const Eigen::MatrixXcd& m, const char* what) {
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                if (i != j)
                    require(std::abs(m(i, j)) <= kHermiticityTol,
                            std::string(what) + ": block not diagonal in the pointer labels");
    };
    check_diagonal(sb.bound, "commutator_expectation: state");
    check_diagonal(pb.bound, "commutator_expectation: pointer observable");
    for (std::size_t k = 0; k < n; ++k) {
        check_diagonal(sb.cont[k], "commutator_expectation: state");
        check_diagonal(pb.cont[k], "commutator_expectation: pointer observable");
    }

    // [P, O] on a diagonal sector multiplies O entrywise by (P_r - P_r');
    // pairing against a diagonal state keeps only r = r' where the factor
    // vanishes. Off-diagonal-in-energy blocks of [P, O] pair against the zero
    // blocks of the stationary state. Both contributions are written out so
    // the cancellation is explicit.
    Complex acc(0.0, 0.0);
    for (Eigen::Index r = 0; r < sb.bound.rows(); ++r) {
        const Complex factor = pb.bound(r, r) - pb.bound(r, r);
        acc += std::conj(sb.bound(r, r)) * factor * ob.bound(r, r);
    }
    for (std::size_t k = 0; k < n; ++k) {
        const double w = grid.weights[static_cast<Eigen::Index>(k)];
        for (Eigen::Index r = 0; r < sb.bound.rows(); ++r) {
            const Complex factor = pb.cont[k](r, r) - pb.cont[k](r, r);
            acc += w * std::conj(sb.cont[k](r, r)) * factor * ob.cont[k](r, r);
        }
    }
    return acc;
}

} // namespace declab
