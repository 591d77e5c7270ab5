// dynamics.hpp — time evolution of state functionals, mean values, the
// equilibrium functional, and deficit scans
//
// Evolution multiplies the energy-off-diagonal components by pure phases
// (e^{i(w_k - w_0)t} on the continuum-bound block and so on) and leaves the
// diagonal components fixed; mean values therefore split into a stationary
// part plus three oscillatory integrals. Plain mode sums the oscillatory
// terms with the grid weights and is only valid while the panels resolve the
// oscillation (max panel width * t <= pi/4). Filon mode integrates them with
// oscillation-exact moments and stays accurate for arbitrary t.
#pragma once

#include <string>
#include <vector>

#include "declab/filon.hpp"
#include "declab/spectral_core.hpp"

namespace declab {

enum class QuadratureMode { Plain, Filon, Auto };

struct DynamicsOptions {
    QuadratureMode mode = QuadratureMode::Auto;
    int filon_segments = 64;
};

struct DecayScan {
    std::vector<double> times;     // strictly increasing
    std::vector<double> deficits;  // >= 0, one per time
    std::vector<double> values;    // raw expectation values (signed data)
    double equilibrium_value = 0.0;
    std::string observable_id;
    std::string state_id;
};

// phases exactly as the evolution prescribes; diagonal blocks untouched
StateFn evolve_state(const StateFn& rho, double t);

// projection onto the energy-diagonal components; idempotent, stationary
StateFn equilibrium_state(const StateFn& rho);

// true while plain-mode quadrature resolves e^{i w t} on every panel
bool resolution_rule_ok(const SpectrumGrid& grid, double t);

// <O>_rho(t); requires self-adjoint O. Plain mode equals
// dual_pairing(evolve_state(rho, t), O) identically.
double expectation(const StateFn& rho, const ObservableFn& O, double t,
                   const DynamicsOptions& opts = {});

// |<O>_rho(t) - <O>_rho*|
double decoherence_deficit(const StateFn& rho, const ObservableFn& O, double t,
                           const DynamicsOptions& opts = {});

DecayScan decay_scan(const StateFn& rho, const ObservableFn& O,
                     const std::vector<double>& times,
                     const DynamicsOptions& opts = {});

// d rho(t)/dt at t = 0: diagonal blocks -> 0, off-diagonal blocks scaled by
// the phase rates i(w - w')
StateDerivative liouvillian_apply(const StateFn& rho);

} // namespace declab
