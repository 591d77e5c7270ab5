// spectral_core.hpp — spectral discretization, observable/state components,
// validation, and the dual pairing (rho|O)
//
// The spectrum has one bound level omega0 < 0 plus a truncated continuum
// [0, omega_max] discretized by a composite Gauss-Legendre rule. Observables
// and states are five-block component functions over that grid:
//
//   bound        (M x M)        value at (omega0, omega0)
//   cont[k]      (M x M)        diagonal continuum value at omega_k
//   cont_bound[k](M x M)        cross value at (omega_k, omega0)
//   bound_cont[k](M x M)        cross value at (omega0, omega_k)
//   cont_cont    (nM x nM)      double-continuum value at (omega_k, omega_l)
//
// M is the number of discrete labels (joint eigenvalues of the commuting
// observables that complete the energy). Continuum functionals follow the
// quadrature-weight convention: a functional concentrated at node k carries
// weight 1/w_k, so discrete pairings reproduce the delta-normalized ones.
// That convention is fixed repository-wide.
#pragma once

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <vector>

#include "declab/common.hpp"
#include "declab/prng.hpp"

namespace declab {

// --------------------------------------------------------------- SpectrumGrid

struct SpectrumGrid {
    double omega0 = 0.0;             // bound energy, < 0
    double omega_max = 0.0;          // continuum truncation
    Eigen::VectorXd nodes;           // strictly increasing, interior to (0, omega_max)
    Eigen::VectorXd weights;         // positive, sum == omega_max
    std::vector<double> panels;      // panel boundaries, size n_panels + 1
    int panel_order = 0;

    std::size_t n_nodes() const { return static_cast<std::size_t>(nodes.size()); }
    std::size_t n_panels() const { return panels.empty() ? 0 : panels.size() - 1; }
    double max_panel_width() const;
};

using GridPtr = std::shared_ptr<const SpectrumGrid>;

// composite Gauss-Legendre rule: n_panels equal panels on [0, omega_max],
// panel_order nodes per panel
GridPtr make_spectrum_grid(double omega0, double omega_max, int n_panels, int panel_order);

// ------------------------------------------------------------- QuantumNumbers

struct QuantumNumbers {
    std::vector<std::vector<int>> labels;  // unique multi-indices m = {m_1..m_N}
    std::vector<int> axis_sizes;           // cardinality per axis

    std::size_t count() const { return labels.size(); }
    std::size_t axes() const { return axis_sizes.size(); }

    // single axis with explicit eigenvalues, e.g. {+1, -1} for parity
    static QuantumNumbers single_axis(std::vector<int> values);
    // cartesian product of per-axis eigenvalue lists
    static QuantumNumbers product(const std::vector<std::vector<int>>& axes);
};

using QnumPtr = std::shared_ptr<const QuantumNumbers>;

// ------------------------------------------------------------ component blocks

struct ComponentBlocks {
    Eigen::MatrixXcd bound;                     // M x M
    std::vector<Eigen::MatrixXcd> cont;         // n of M x M
    std::vector<Eigen::MatrixXcd> cont_bound;   // n of M x M
    std::vector<Eigen::MatrixXcd> bound_cont;   // n of M x M
    Eigen::MatrixXcd cont_cont;                 // nM x nM

    static ComponentBlocks zero(std::size_t n_nodes, std::size_t n_labels);

    Eigen::Block<Eigen::MatrixXcd> cc(std::size_t k, std::size_t l, std::size_t M) {
        return cont_cont.block(static_cast<Eigen::Index>(k * M),
                               static_cast<Eigen::Index>(l * M),
                               static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));
    }
    Eigen::Block<const Eigen::MatrixXcd> cc(std::size_t k, std::size_t l, std::size_t M) const {
        return cont_cont.block(static_cast<Eigen::Index>(k * M),
                               static_cast<Eigen::Index>(l * M),
                               static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));
    }
};

// ---------------------------------------------------------------- ObservableFn

class ObservableFn {
public:
    // checked constructor: verifies shapes; if self_adjoint is requested the
    // hermiticity relations are verified to 1e-12
    static ObservableFn create(GridPtr grid, QnumPtr qnums, ComponentBlocks blocks,
                               bool self_adjoint);

    const SpectrumGrid& grid() const { return *grid_; }
    const QuantumNumbers& qnums() const { return *qnums_; }
    GridPtr grid_ptr() const { return grid_; }
    QnumPtr qnums_ptr() const { return qnums_; }
    const ComponentBlocks& blocks() const { return blocks_; }
    bool self_adjoint() const { return self_adjoint_; }
    std::size_t n_labels() const { return qnums_->count(); }

    // true when all energy-off-diagonal blocks vanish identically
    bool energy_diagonal() const;

    // largest violation of the self-adjointness relations
    double self_adjointness_defect() const;

private:
    ObservableFn(GridPtr g, QnumPtr q, ComponentBlocks b, bool sa)
        : grid_(std::move(g)), qnums_(std::move(q)), blocks_(std::move(b)), self_adjoint_(sa) {}

    GridPtr grid_;
    QnumPtr qnums_;
    ComponentBlocks blocks_;
    bool self_adjoint_;
};

// -------------------------------------------------------------------- StateFn

class StateFn {
public:
    // checked constructor: rejects hermiticity violations beyond 1e-12.
    // Normalization and positivity are *reported* by validate_state, not
    // enforced here (a scaled state is a legal object to inspect).
    static StateFn create(GridPtr grid, QnumPtr qnums, ComponentBlocks blocks);

    // unchecked construction for diagnostics and tests of the validator
    static StateFn unchecked(GridPtr grid, QnumPtr qnums, ComponentBlocks blocks);

    const SpectrumGrid& grid() const { return *grid_; }
    const QuantumNumbers& qnums() const { return *qnums_; }
    GridPtr grid_ptr() const { return grid_; }
    QnumPtr qnums_ptr() const { return qnums_; }
    const ComponentBlocks& blocks() const { return blocks_; }
    std::size_t n_labels() const { return qnums_->count(); }

    bool energy_diagonal() const;

    // bound trace + weighted continuum trace (the (rho|I) value)
    double total_mass() const;

private:
    StateFn(GridPtr g, QnumPtr q, ComponentBlocks b)
        : grid_(std::move(g)), qnums_(std::move(q)), blocks_(std::move(b)) {}

    GridPtr grid_;
    QnumPtr qnums_;
    ComponentBlocks blocks_;
};

// derivative of a state along the evolution; same block layout but not a
// state (zero diagonal blocks, no normalization)
struct StateDerivative {
    GridPtr grid;
    QnumPtr qnums;
    ComponentBlocks blocks;
};

// ----------------------------------------------------------- ValidationReport

struct ValidationReport {
    double hermiticity_defect = 0.0;   // max |violation| of the component relations
    double negativity_defect = 0.0;    // most negative diagonal entry (<= 0)
    double normalization_defect = 0.0; // |(rho|I) - 1|
    bool hermiticity_pass = false;
    bool negativity_pass = false;
    bool normalization_pass = false;

    bool pass() const { return hermiticity_pass && negativity_pass && normalization_pass; }
};

ValidationReport validate_state(const StateFn& rho);

// enforce the hermiticity relations by averaging with the adjoint layout
StateFn symmetrize(const StateFn& rho);

// ------------------------------------------------------------------ operations

ObservableFn identity_observable(GridPtr grid, QnumPtr qnums);

// H itself as an observable: bound block omega0*Id, node blocks omega_k*Id
ObservableFn hamiltonian_observable(GridPtr grid, QnumPtr qnums);

// adjoint observable (blocks swapped/conjugated per the self-adjointness rules)
ObservableFn adjoint_observable(const ObservableFn& O);

// (rho|O): conjugated state components against observable components, continuum
// sums weighted by the quadrature (w_k for single integrals, w_k w_l for double)
Complex dual_pairing(const StateFn& rho, const ObservableFn& O);

// pairing against a state derivative (same weights)
Complex dual_pairing(const StateDerivative& drho, const ObservableFn& O);

// blockwise matrix power of an energy-diagonal observable; n = 0 gives identity
ObservableFn diagonal_power(const ObservableFn& O, int n);

// ------------------------------------------------------- profile constructors

// unit-normalized Gaussian amplitude samples \propto exp(-(w-center)^2/(4 width^2));
// the squared profile has mass 1 under the grid weights
Eigen::VectorXcd gaussian_amplitude(const SpectrumGrid& grid, double center, double width);

// unit-normalized amplitude Gaussian in k = sqrt(2 w) instead of w; packets
// built from it have symmetric spatial tails (no dispersion skew), which the
// phase-space transforms rely on for their kernel-decay validation
Eigen::VectorXcd gaussian_momentum_amplitude(const SpectrumGrid& grid, double k_center,
                                             double k_width);

// estimated profile mass beyond [0, omega_max] (erfc tails of the squared profile)
double gaussian_tail_mass(const SpectrumGrid& grid, double center, double width);

// built-in constructors reject profiles with tail mass >= 1e-8
constexpr double kTailMassTol = 1e-8;

// pure-type state from bound amplitudes (length M) and continuum amplitudes
// (n x M): bound = b b^dag, cont[k] = f_k f_k^dag, cross = f_k b^dag, and
// cc(k,l) = f_k f_l^dag; rescaled so (rho|I) = 1
StateFn pure_state(GridPtr grid, QnumPtr qnums,
                   const Eigen::VectorXcd& bound_amp,
                   const Eigen::MatrixXcd& cont_amp);

// energy-diagonal mixture from explicit Hermitian PSD blocks; rescaled to mass 1
StateFn diagonal_mixture_state(GridPtr grid, QnumPtr qnums,
                               const Eigen::MatrixXcd& bound_block,
                               const std::vector<Eigen::MatrixXcd>& cont_blocks);

// seeded random smooth state: Gaussian-mixture amplitudes per label plus a
// random bound component; optionally mixes in an energy-diagonal part
StateFn random_smooth_state(Prng& rng, GridPtr grid, QnumPtr qnums,
                            bool with_diagonal_mixture = true);

// seeded random self-adjoint observable with smooth continuum profiles
ObservableFn random_smooth_observable(Prng& rng, GridPtr grid, QnumPtr qnums);

} // namespace declab
