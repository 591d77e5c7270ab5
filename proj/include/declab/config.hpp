// config.hpp — experiment configuration: schema-validated JSON in, built
// states/observables/grids out
//
// The schema is documented in the README. Unknown keys anywhere in the
// document are rejected before any computation runs.
#pragma once

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "declab/dynamics.hpp"
#include "declab/spectral_core.hpp"
#include "declab/wigner_classical.hpp"

namespace declab {

struct GaussianProfileSpec {
    // gaussian: amplitude Gaussian in the energy, parameters (center, width)
    // packet:   amplitude Gaussian in k = sqrt(2w) displaced to `position`,
    //           with the model phase on even-parity labels
    std::string kind = "gaussian";
    int label = 0;            // label index the profile feeds
    double center = 1.0;
    double width = 0.25;
    double position = 0.0;    // packet displacement
    Complex coeff{1.0, 0.0};
};

struct DiagonalProfileSpec {
    int label = 0;
    double center = 1.0;
    double width = 0.5;
    double weight = 1.0;
};

struct StateSpec {
    std::vector<Complex> bound_amplitudes;       // per label; may be empty
    std::vector<GaussianProfileSpec> continuum;  // pure-part amplitudes
    double diagonal_weight = 0.0;                // mass fraction of the mixed part
    std::vector<DiagonalProfileSpec> diagonal;
};

struct ObservableSpec {
    // identity | hamiltonian | cc_uniform | label_axis | random_smooth
    std::string kind = "identity";
    int label_row = 0;   // cc_uniform channel
    int label_col = 0;
    int axis = 0;        // label_axis: diagonal observable with the axis eigenvalues
};

struct TimesSpec {
    std::string kind = "log";  // log | linear | explicit
    double t_min = 0.1;
    double t_max = 100.0;
    int count = 40;
    std::vector<double> values;
};

struct PointerSpec {
    double degeneracy_tol = 1e-10;
    bool secondary_axis = false;     // resolve degeneracies against a label axis
    int secondary_axis_index = 0;
    int max_moment_order = 8;
    int n_random_observables = 100;
};

struct ScalingSpec {
    // dedicated (heavier) setup for the hbar-scaling study: the probe packet
    // must overlap the potential, and the spectral grid must resolve the
    // eigenfunction oscillations at the smallest hbar
    double omega_max = 26.0;
    int n_panels = 120;
    int panel_order = 10;
    double q_half = 13.5;
    int n_q = 801;
    double p_half = 3.0;
    int n_p = 201;
    double lambda_half = 9.0;
    double q_cut = 1.0;
    double packet_k_center = 3.6;
    double packet_k_width = 0.42;
    double packet_position = 2.8;
    double coupling = 0.5;
    // product-correspondence side (windowed symbols, small coupling)
    double product_omega_max = 8.0;
    int product_n_panels = 40;
    double product_q_half = 12.0;
    int product_n_q = 481;
    double product_p_half = 3.0;
    int product_n_p = 121;
    double product_lambda_half = 6.0;
    double product_q_cut = 3.0;
    double product_coupling = 0.1;
};

struct WignerSpec {
    double q_half = 21.0;
    int n_q = 841;
    double p_half = 6.0;
    int n_p = 241;
    double lambda_half = 19.0;
    double hbar = 1.0;
    std::vector<double> hbar_list{1.0, 0.5, 0.25};
    double model_g = 1.0;
    int n_pairs = 10;
    ScalingSpec scaling;
};

struct CheckSpec {
    int n_random_states = 25;
    int n_random_observables = 25;
    bool break_hermiticity = false;  // deliberate defect fixture
};

struct ExperimentConfig {
    std::uint64_t seed = 1;
    double omega0 = -0.5;
    double omega_max = 10.0;
    int n_panels = 32;
    int panel_order = 10;
    std::vector<std::vector<int>> label_axes{{1, -1}};

    StateSpec state;
    ObservableSpec observable;
    TimesSpec times;
    DynamicsOptions dynamics;
    PointerSpec pointer;
    WignerSpec wigner;
    CheckSpec check;
    std::string output_dir = "out";

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load(const std::filesystem::path& path);
};

GridPtr build_grid(const ExperimentConfig& cfg);
QnumPtr build_qnums(const ExperimentConfig& cfg);
StateFn build_state(const ExperimentConfig& cfg, GridPtr grid, QnumPtr qnums);
ObservableFn build_observable(const ObservableSpec& spec, GridPtr grid, QnumPtr qnums,
                              std::uint64_t seed = 1);
std::vector<double> build_times(const TimesSpec& spec);

// moving packet aimed at `position` with asymptotic model phases on each
// parity channel; used by the scaling study and available to state specs
StateFn build_moving_packet(GridPtr grid, QnumPtr qnums, double k_center, double k_width,
                            double position, double coupling, double hbar);

} // namespace declab
