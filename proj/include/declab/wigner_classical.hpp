// wigner_classical.hpp — phase-space transforms over the delta-well model,
// quantum/classical pairing agreement, hbar-scaling residuals, and the
// classical equilibrium ensemble
//
// Conventions.
//  * State transform:      W(q,p) = (1/pi hbar) \int dl K(q-l, q+l) e^{2 i l p / hbar}
//  * Observable transform: O^W(q,p) = \int dl <q-l/2|O|q+l/2> e^{i l p / hbar},
//    implemented through the substitution l -> 2u so both transforms walk the
//    same kernel strip K(q-u, q+u) with phases e^{2 i u p / hbar}.
//  * The l-integral runs on the q lattice (same spacing) with trapezoid
//    weights, truncated to |l| <= lambda_half; kernels must have decayed
//    below 1e-8 (relative) at the truncation boundary.
//  * Position kernels contract the bound, cross, and double-continuum blocks.
//    The singular diagonal continuum component has no trace-class kernel on
//    a finite grid; its classical content is exactly the level-set ensemble
//    built by classical_equilibrium_density. States whose double-continuum
//    block carries the matching diagonal profile (every state built by
//    pure_state does) reproduce trace and normalization on the grid.
//  * Observables with non-decaying kernels (identity, H, pointer observables)
//    are transformed with a Gaussian lambda window, applied automatically
//    when the boundary-decay validation would fail; the window is the
//    numerical regularization of the truncated transform and smears symbols
//    in p by hbar/(2 sigma_lambda).
#pragma once

#include <Eigen/Dense>

#include <vector>

#include "declab/delta_well.hpp"
#include "declab/pointer_basis.hpp"
#include "declab/spectral_core.hpp"

namespace declab {

// ------------------------------------------------------------- PhaseSpaceGrid

struct PhaseSpaceGrid {
    double q_half = 10.0;       // q in [-q_half, q_half]
    int n_q = 256;
    double p_half = 4.0;        // p in [-p_half, p_half]
    int n_p = 128;
    double lambda_half = 8.0;   // transform range, <= 2 q_half
    double hbar = 1.0;

    void validate() const;
    double dq() const { return 2.0 * q_half / (n_q - 1); }
    double dp() const { return 2.0 * p_half / (n_p - 1); }
    double q_at(int i) const { return -q_half + i * dq(); }
    double p_at(int j) const { return -p_half + j * dp(); }
    int lambda_steps() const { return static_cast<int>(lambda_half / dq() + 1e-9); }

    PhaseSpaceGrid with_hbar(double h) const {
        PhaseSpaceGrid g = *this;
        g.hbar = h;
        return g;
    }
};

// ------------------------------------------------------------- PositionKernel

struct PositionKernel {
    Eigen::MatrixXcd K;               // n_q x n_q, K(q, q')
    double hermiticity_defect = 0.0;  // max |K - K^dag| relative to max |K|
    double trace = 0.0;               // trapezoid quadrature of the diagonal
    double boundary_decay = 0.0;      // max |K| on the lambda/grid boundary, relative
};

PositionKernel position_kernel(const StateFn& rho, const DeltaWellModel& model,
                               const PhaseSpaceGrid& grid);

// kernel of an arbitrary block object (derivatives, scaled blocks); observable
// kernels include the diagonal continuum block, state kernels do not
PositionKernel kernel_from_blocks(const ComponentBlocks& blocks, const QuantumNumbers& qnums,
                                  const SpectrumGrid& sgrid, const DeltaWellModel& model,
                                  const PhaseSpaceGrid& grid, bool include_diagonal);

// -------------------------------------------------------------- WignerDensity

struct WignerDensity {
    Eigen::MatrixXd W;            // n_q x n_p
    double normalization = 0.0;   // trapezoid integral over the grid
    double max_imag_residue = 0.0;
};

WignerDensity wigner_state(const PositionKernel& kernel, const PhaseSpaceGrid& grid);

// ---------------------------------------------------------------- SymbolTable

enum class LambdaWindow { Auto, On, Off };

struct SymbolTable {
    Eigen::MatrixXd W;            // n_q x n_p
    double max_imag_residue = 0.0;
    bool window_applied = false;
    double window_sigma = 0.0;    // lambda-space width of the applied window
};

SymbolTable wigner_observable(const ObservableFn& O, const DeltaWellModel& model,
                              const PhaseSpaceGrid& grid,
                              LambdaWindow window = LambdaWindow::Auto);

// 2-D trapezoid quadrature of W * O^W
double phase_space_pairing(const WignerDensity& W, const SymbolTable& OW,
                           const PhaseSpaceGrid& grid);

// ------------------------------------------------------- hbar-scaling reports

struct ScalingPoint {
    double hbar = 0.0;
    double residual = 0.0;   // grid L2 norm of the mismatch
    double reference = 0.0;  // grid L2 norm of the quantum side
};

struct ScalingReport {
    std::vector<ScalingPoint> points;
    double slope = 0.0;      // log-log fit of residual against hbar
};

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Liouville transport residual: the transform of the von-Neumann-scaled
// generator (-1/hbar * phase-rate blocks) against the Poisson bracket
// {H^W, rho^W} evaluated with centered finite differences. The norm excludes
// |q| < q_cut (the potential's footprint) and the finite-difference border.
// The model is rebuilt at each requested hbar (same coupling).
ScalingReport moyal_vs_poisson_residual(const StateFn& rho, const DeltaWellModel& model,
                                        const PhaseSpaceGrid& grid,
                                        const std::vector<double>& hbar_list,
                                        double q_cut);

// product correspondence residual |(O1 O2)^W - O1^W O2^W| for energy-diagonal
// observables, per hbar, same masking
ScalingReport product_correspondence_residual(const ObservableFn& O1, const ObservableFn& O2,
                                              const DeltaWellModel& model,
                                              const PhaseSpaceGrid& grid,
                                              const std::vector<double>& hbar_list,
                                              double q_cut);

// --------------------------------------------------------- ClassicalEnsemble

struct ClassicalParticle {
    double weight = 0.0;       // >= 0
    double energy = 0.0;       // level-set value of the classical Hamiltonian
    std::size_t label = 0;     // pointer label index r
    bool bound = false;
};

struct ClassicalEnsemble {
    std::vector<ClassicalParticle> particles;
    QnumPtr qnums;
    double total_weight = 0.0;

    // classical kinetic symbol away from the potential's support
    static double hamiltonian_symbol(double /*q*/, double p) { return 0.5 * p * p; }
    // pointer symbol value carried by a particle
    double pointer_symbol(const ClassicalParticle& part, std::size_t axis) const {
        return static_cast<double>(qnums->labels[part.label][axis]);
    }
};

// level-set particle representation of a pointer-diagonal stationary state;
// one particle per (bound-or-node, label) with weight rho_r(x) (times the
// quadrature weight on continuum nodes)
ClassicalEnsemble classical_equilibrium_density(const StateFn& rho_star_pointer,
                                                const PointerTransform& U,
                                                const DeltaWellModel& model);

struct MomentTable {
    std::vector<double> per_particle;  // moment value carried by each particle
    double aggregate = 0.0;            // weight-averaged moment
};

struct HamiltonianMoment {};
using MomentSelector = std::variant<HamiltonianMoment, std::size_t>;  // H or axis i

MomentTable classical_moments(const ClassicalEnsemble& ens, MomentSelector which, int n);

} // namespace declab
