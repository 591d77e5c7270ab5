// pointer_basis.hpp — construction of the final pointer basis
//
// Diagonalizes the energy-diagonal blocks of a state (the only components
// that survive the weak limit), tracks the eigenvector families continuously
// across the continuum nodes, and builds the exact pointer observables that
// are diagonal in the resulting basis with integer label eigenvalues.
#pragma once

#include <Eigen/Dense>

#include <optional>
#include <variant>
#include <vector>

#include "declab/spectral_core.hpp"

namespace declab {

struct PointerTransform {
    GridPtr grid;                          // grid the transform was built on
    Eigen::MatrixXcd bound_U;              // M x M unitary for the bound block
    std::vector<Eigen::MatrixXcd> cont_U;  // per-node unitaries
    Eigen::VectorXd bound_eigs;            // descending
    Eigen::MatrixXd cont_eigs;             // n x M, tracked ordering per node
    double min_overlap = 1.0;              // smallest successive-node overlap

    std::size_t n_nodes() const { return cont_U.size(); }
};

struct DiagonalizeOptions {
    double overlap_threshold = 0.5;    // tracking failure below this
    double degeneracy_rel_tol = 1e-10; // eigenvalue cluster detection
    // optional secondary Hermitian observable resolving degenerate clusters
    std::optional<ObservableFn> secondary;
};

// Hermitian eigendecomposition of the bound and per-node continuum blocks.
// Ordering: eigenvalues descending at the anchor (first continuum) node, then
// maximal-overlap assignment between adjacent nodes; phases fixed by making
// the largest-magnitude eigenvector component real and positive. The bound
// block is handled independently (descending order).
PointerTransform diagonalize_blocks(const StateFn& rho, const DiagonalizeOptions& opts = {});

// conjugate all five blocks by the node unitaries; pairings are preserved
// when state and observable are transformed together
StateFn transform_state(const StateFn& rho, const PointerTransform& U);
ObservableFn transform_observable(const ObservableFn& O, const PointerTransform& U);

// exact pointer observables P_i, one per label axis: diagonal in the pointer
// basis with eigenvalue r_i on slot r, expressed in the original basis
std::vector<ObservableFn> pointer_observables(const PointerTransform& U, QnumPtr qnums);

// energy-sector selector: the bound level or a continuum node index
struct BoundSector {};
using SectorSelector = std::variant<BoundSector, std::size_t>;

// evaluates the basis functional (x, rr| against O^n under the co-basis
// weight convention; for O = H this is x^n exactly
double moment_check(SectorSelector x, std::size_t r, const ObservableFn& O, int n);

// (rho*|[P, O]) for a pointer-diagonal stationary state and a pointer
// observable; identically zero for conforming inputs
Complex commutator_expectation(const StateFn& rho_star, const ObservableFn& P,
                               const ObservableFn& O);

} // namespace declab
