#include "declab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace declab {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    require(j.is_object(), "config: " + where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        require(allowed.count(it.key()) > 0,
                "config: unknown key '" + it.key() + "' in " + where);
}

Complex parse_complex(const json& j, const std::string& where) {
    if (j.is_number()) return Complex(j.get<double>(), 0.0);
    require(j.is_array() && j.size() == 2, "config: " + where + " must be a number or [re, im]");
    return Complex(j[0].get<double>(), j[1].get<double>());
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

} // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    reject_unknown(j, {"seed", "grid", "labels", "state", "observable", "times", "dynamics",
                       "pointer", "wigner", "check", "output"},
                   "top level");
    ExperimentConfig cfg;
    cfg.seed = get_or<std::uint64_t>(j, "seed", 1);

    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        reject_unknown(g, {"omega0", "omega_max", "n_panels", "panel_order"}, "grid");
        cfg.omega0 = get_or(g, "omega0", cfg.omega0);
        cfg.omega_max = get_or(g, "omega_max", cfg.omega_max);
        cfg.n_panels = get_or(g, "n_panels", cfg.n_panels);
        cfg.panel_order = get_or(g, "panel_order", cfg.panel_order);
    }

    if (j.contains("labels")) {
        const auto& l = j.at("labels");
        reject_unknown(l, {"axes"}, "labels");
        require(l.contains("axes"), "config: labels needs 'axes'");
        cfg.label_axes = l.at("axes").get<std::vector<std::vector<int>>>();
    }

    if (j.contains("state")) {
        const auto& s = j.at("state");
        reject_unknown(s, {"bound", "continuum", "diagonal_weight", "diagonal"}, "state");
        if (s.contains("bound"))
            for (const auto& a : s.at("bound"))
                cfg.state.bound_amplitudes.push_back(parse_complex(a, "state.bound entry"));
        if (s.contains("continuum"))
            for (const auto& p : s.at("continuum")) {
                reject_unknown(p, {"kind", "label", "center", "width", "coeff", "position"},
                               "state.continuum entry");
                GaussianProfileSpec spec;
                spec.kind = get_or<std::string>(p, "kind", "gaussian");
                require(spec.kind == "gaussian" || spec.kind == "packet",
                        "config: continuum profile kind must be gaussian|packet");
                spec.label = get_or(p, "label", 0);
                spec.center = get_or(p, "center", spec.center);
                spec.width = get_or(p, "width", spec.width);
                spec.position = get_or(p, "position", 0.0);
                if (p.contains("coeff")) spec.coeff = parse_complex(p.at("coeff"), "coeff");
                cfg.state.continuum.push_back(spec);
            }
        cfg.state.diagonal_weight = get_or(s, "diagonal_weight", 0.0);
        if (s.contains("diagonal"))
            for (const auto& p : s.at("diagonal")) {
                reject_unknown(p, {"label", "center", "width", "weight"}, "state.diagonal entry");
                DiagonalProfileSpec spec;
                spec.label = get_or(p, "label", 0);
                spec.center = get_or(p, "center", spec.center);
                spec.width = get_or(p, "width", spec.width);
                spec.weight = get_or(p, "weight", spec.weight);
                cfg.state.diagonal.push_back(spec);
            }
    }

    if (j.contains("observable")) {
        const auto& o = j.at("observable");
        reject_unknown(o, {"kind", "label_row", "label_col", "axis"}, "observable");
        cfg.observable.kind = get_or<std::string>(o, "kind", "identity");
        cfg.observable.label_row = get_or(o, "label_row", 0);
        cfg.observable.label_col = get_or(o, "label_col", 0);
        cfg.observable.axis = get_or(o, "axis", 0);
    }

    if (j.contains("times")) {
        const auto& t = j.at("times");
        reject_unknown(t, {"kind", "t_min", "t_max", "count", "values"}, "times");
        cfg.times.kind = get_or<std::string>(t, "kind", "log");
        cfg.times.t_min = get_or(t, "t_min", cfg.times.t_min);
        cfg.times.t_max = get_or(t, "t_max", cfg.times.t_max);
        cfg.times.count = get_or(t, "count", cfg.times.count);
        if (t.contains("values")) cfg.times.values = t.at("values").get<std::vector<double>>();
    }

    if (j.contains("dynamics")) {
        const auto& d = j.at("dynamics");
        reject_unknown(d, {"mode", "filon_segments"}, "dynamics");
        const std::string mode = get_or<std::string>(d, "mode", "auto");
        if (mode == "auto") cfg.dynamics.mode = QuadratureMode::Auto;
        else if (mode == "plain") cfg.dynamics.mode = QuadratureMode::Plain;
        else if (mode == "filon") cfg.dynamics.mode = QuadratureMode::Filon;
        else throw std::invalid_argument("config: dynamics.mode must be auto|plain|filon");
        cfg.dynamics.filon_segments = get_or(d, "filon_segments", cfg.dynamics.filon_segments);
    }

    if (j.contains("pointer")) {
        const auto& p = j.at("pointer");
        reject_unknown(p, {"degeneracy_tol", "secondary_axis", "secondary_axis_index",
                           "max_moment_order", "n_random_observables"},
                       "pointer");
        cfg.pointer.degeneracy_tol = get_or(p, "degeneracy_tol", cfg.pointer.degeneracy_tol);
        cfg.pointer.secondary_axis = get_or(p, "secondary_axis", false);
        cfg.pointer.secondary_axis_index = get_or(p, "secondary_axis_index", 0);
        cfg.pointer.max_moment_order = get_or(p, "max_moment_order", cfg.pointer.max_moment_order);
        cfg.pointer.n_random_observables =
            get_or(p, "n_random_observables", cfg.pointer.n_random_observables);
    }

    if (j.contains("wigner")) {
        const auto& w = j.at("wigner");
        reject_unknown(w, {"q_half", "n_q", "p_half", "n_p", "lambda_half", "hbar",
                           "hbar_list", "model_g", "n_pairs", "scaling"},
                       "wigner");
        cfg.wigner.q_half = get_or(w, "q_half", cfg.wigner.q_half);
        cfg.wigner.n_q = get_or(w, "n_q", cfg.wigner.n_q);
        cfg.wigner.p_half = get_or(w, "p_half", cfg.wigner.p_half);
        cfg.wigner.n_p = get_or(w, "n_p", cfg.wigner.n_p);
        cfg.wigner.lambda_half = get_or(w, "lambda_half", cfg.wigner.lambda_half);
        cfg.wigner.hbar = get_or(w, "hbar", cfg.wigner.hbar);
        if (w.contains("hbar_list"))
            cfg.wigner.hbar_list = w.at("hbar_list").get<std::vector<double>>();
        cfg.wigner.model_g = get_or(w, "model_g", cfg.wigner.model_g);
        cfg.wigner.n_pairs = get_or(w, "n_pairs", cfg.wigner.n_pairs);
        if (w.contains("scaling")) {
            const auto& s = w.at("scaling");
            reject_unknown(s, {"omega_max", "n_panels", "panel_order", "q_half", "n_q",
                               "p_half", "n_p", "lambda_half", "q_cut", "packet_k_center",
                               "packet_k_width", "packet_position", "coupling",
                               "product_omega_max", "product_n_panels", "product_q_half",
                               "product_n_q", "product_p_half", "product_n_p",
                               "product_lambda_half", "product_q_cut", "product_coupling"},
                           "wigner.scaling");
            auto& sc = cfg.wigner.scaling;
            sc.omega_max = get_or(s, "omega_max", sc.omega_max);
            sc.n_panels = get_or(s, "n_panels", sc.n_panels);
            sc.panel_order = get_or(s, "panel_order", sc.panel_order);
            sc.q_half = get_or(s, "q_half", sc.q_half);
            sc.n_q = get_or(s, "n_q", sc.n_q);
            sc.p_half = get_or(s, "p_half", sc.p_half);
            sc.n_p = get_or(s, "n_p", sc.n_p);
            sc.lambda_half = get_or(s, "lambda_half", sc.lambda_half);
            sc.q_cut = get_or(s, "q_cut", sc.q_cut);
            sc.packet_k_center = get_or(s, "packet_k_center", sc.packet_k_center);
            sc.packet_k_width = get_or(s, "packet_k_width", sc.packet_k_width);
            sc.packet_position = get_or(s, "packet_position", sc.packet_position);
            sc.coupling = get_or(s, "coupling", sc.coupling);
            sc.product_omega_max = get_or(s, "product_omega_max", sc.product_omega_max);
            sc.product_n_panels = get_or(s, "product_n_panels", sc.product_n_panels);
            sc.product_q_half = get_or(s, "product_q_half", sc.product_q_half);
            sc.product_n_q = get_or(s, "product_n_q", sc.product_n_q);
            sc.product_p_half = get_or(s, "product_p_half", sc.product_p_half);
            sc.product_n_p = get_or(s, "product_n_p", sc.product_n_p);
            sc.product_lambda_half = get_or(s, "product_lambda_half", sc.product_lambda_half);
            sc.product_q_cut = get_or(s, "product_q_cut", sc.product_q_cut);
            sc.product_coupling = get_or(s, "product_coupling", sc.product_coupling);
        }
    }

    if (j.contains("check")) {
        const auto& c = j.at("check");
        reject_unknown(c, {"n_random_states", "n_random_observables", "break_hermiticity"},
                       "check");
        cfg.check.n_random_states = get_or(c, "n_random_states", cfg.check.n_random_states);
        cfg.check.n_random_observables =
            get_or(c, "n_random_observables", cfg.check.n_random_observables);
        cfg.check.break_hermiticity = get_or(c, "break_hermiticity", false);
    }

    if (j.contains("output")) {
        const auto& o = j.at("output");
        reject_unknown(o, {"dir"}, "output");
        cfg.output_dir = get_or<std::string>(o, "dir", cfg.output_dir);
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument("config: parse error in " + path.string() + ": " + e.what());
    }
    return from_json(j);
}

GridPtr build_grid(const ExperimentConfig& cfg) {
    return make_spectrum_grid(cfg.omega0, cfg.omega_max, cfg.n_panels, cfg.panel_order);
}

QnumPtr build_qnums(const ExperimentConfig& cfg) {
    return std::make_shared<const QuantumNumbers>(QuantumNumbers::product(cfg.label_axes));
}

StateFn build_state(const ExperimentConfig& cfg, GridPtr grid, QnumPtr qnums) {
    const std::size_t M = qnums->count();
    const std::size_t n = grid->n_nodes();

    Eigen::VectorXcd bound = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(M));
    for (std::size_t m = 0; m < cfg.state.bound_amplitudes.size(); ++m) {
        require(m < M, "config: more bound amplitudes than labels");
        bound[static_cast<Eigen::Index>(m)] = cfg.state.bound_amplitudes[m];
    }

    Eigen::MatrixXcd amp = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n),
                                                  static_cast<Eigen::Index>(M));
    for (const auto& p : cfg.state.continuum) {
        require(p.label >= 0 && static_cast<std::size_t>(p.label) < M,
                "config: continuum profile label out of range");
        if (p.kind == "packet") {
            // center/width are momentum-space parameters here
            const Eigen::VectorXcd prof = gaussian_momentum_amplitude(*grid, p.center, p.width);
            const double kappa = cfg.wigner.model_g / (cfg.wigner.hbar * cfg.wigner.hbar);
            const bool even = qnums->labels[static_cast<std::size_t>(p.label)][0] > 0;
            for (std::size_t k = 0; k < n; ++k) {
                const double kk = std::sqrt(2.0 * grid->nodes[static_cast<Eigen::Index>(k)]) /
                                  cfg.wigner.hbar;
                const double phase = even ? -(kk * p.position + std::atan2(kappa, kk))
                                          : -kk * p.position;
                amp(static_cast<Eigen::Index>(k), p.label) +=
                    p.coeff * std::exp(Complex(0.0, phase)) * prof[static_cast<Eigen::Index>(k)];
            }
            continue;
        }
        require(gaussian_tail_mass(*grid, p.center, p.width) < kTailMassTol,
                "config: continuum profile has mass beyond the truncation "
                "(tail estimate >= 1e-8)");
        amp.col(p.label) += p.coeff * gaussian_amplitude(*grid, p.center, p.width);
    }
    require(bound.squaredNorm() + amp.squaredNorm() > 0.0, "config: state has no content");

    StateFn pure = pure_state(grid, qnums, bound, amp);
    const double pd = cfg.state.diagonal_weight;
    require(pd >= 0.0 && pd < 1.0, "config: diagonal_weight must be in [0, 1)");
    if (pd == 0.0 || cfg.state.diagonal.empty()) return pure;

    std::vector<Eigen::MatrixXcd> diag(n, Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(M),
                                                                 static_cast<Eigen::Index>(M)));
    for (const auto& p : cfg.state.diagonal) {
        require(p.label >= 0 && static_cast<std::size_t>(p.label) < M,
                "config: diagonal profile label out of range");
        require(gaussian_tail_mass(*grid, p.center, p.width) < kTailMassTol,
                "config: diagonal profile has mass beyond the truncation");
        const Eigen::VectorXcd g = gaussian_amplitude(*grid, p.center, p.width);
        for (std::size_t k = 0; k < n; ++k)
            diag[k](p.label, p.label) += p.weight * std::norm(g[static_cast<Eigen::Index>(k)]);
    }
    StateFn mixture = diagonal_mixture_state(grid, qnums,
                                             Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(M),
                                                                    static_cast<Eigen::Index>(M)),
                                             diag);

    ComponentBlocks mix = ComponentBlocks::zero(n, M);
    mix.bound = (1.0 - pd) * pure.blocks().bound + pd * mixture.blocks().bound;
    for (std::size_t k = 0; k < n; ++k) {
        mix.cont[k] = (1.0 - pd) * pure.blocks().cont[k] + pd * mixture.blocks().cont[k];
        mix.cont_bound[k] = (1.0 - pd) * pure.blocks().cont_bound[k];
        mix.bound_cont[k] = (1.0 - pd) * pure.blocks().bound_cont[k];
    }
    mix.cont_cont = (1.0 - pd) * pure.blocks().cont_cont;
    return StateFn::create(std::move(grid), std::move(qnums), std::move(mix));
}

ObservableFn build_observable(const ObservableSpec& spec, GridPtr grid, QnumPtr qnums,
                              std::uint64_t seed) {
    const std::size_t M = qnums->count();
    if (spec.kind == "identity") return identity_observable(std::move(grid), std::move(qnums));
    if (spec.kind == "hamiltonian")
        return hamiltonian_observable(std::move(grid), std::move(qnums));
    if (spec.kind == "cc_uniform") {
        require(spec.label_row >= 0 && static_cast<std::size_t>(spec.label_row) < M &&
                spec.label_col >= 0 && static_cast<std::size_t>(spec.label_col) < M,
                "config: cc_uniform channel out of range");
        ComponentBlocks b = ComponentBlocks::zero(grid->n_nodes(), M);
        for (std::size_t k = 0; k < grid->n_nodes(); ++k)
            for (std::size_t l = 0; l < grid->n_nodes(); ++l) {
                b.cc(k, l, M)(spec.label_row, spec.label_col) += Complex(1.0, 0.0);
                b.cc(k, l, M)(spec.label_col, spec.label_row) += Complex(1.0, 0.0);
            }
        b.cont_cont *= 0.5;
        b.cont_cont = (b.cont_cont + b.cont_cont.adjoint()).eval();
        return ObservableFn::create(std::move(grid), std::move(qnums), std::move(b), true);
    }
    if (spec.kind == "label_axis") {
        require(spec.axis >= 0 && static_cast<std::size_t>(spec.axis) < qnums->axes(),
                "config: label axis out of range");
        ComponentBlocks b = ComponentBlocks::zero(grid->n_nodes(), M);
        Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(M),
                                                    static_cast<Eigen::Index>(M));
        for (std::size_t r = 0; r < M; ++r)
            D(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r)) =
                static_cast<double>(qnums->labels[r][static_cast<std::size_t>(spec.axis)]);
        b.bound = D;
        for (auto& m : b.cont) m = D;
        return ObservableFn::create(std::move(grid), std::move(qnums), std::move(b), true);
    }
    if (spec.kind == "random_smooth") {
        Prng rng(seed);
        return random_smooth_observable(rng, std::move(grid), std::move(qnums));
    }
    throw std::invalid_argument("config: unknown observable kind '" + spec.kind + "'");
}

StateFn build_moving_packet(GridPtr grid, QnumPtr qnums, double k_center, double k_width,
                            double position, double coupling, double hbar) {
    require(qnums->count() == 2, "build_moving_packet: needs the two parity labels");
    const std::size_t n = grid->n_nodes();
    const double kappa = coupling / (hbar * hbar);
    Eigen::MatrixXcd amp(static_cast<Eigen::Index>(n), 2);
    const Eigen::VectorXcd prof = gaussian_momentum_amplitude(*grid, k_center, k_width);
    for (std::size_t k = 0; k < n; ++k) {
        const double kk = std::sqrt(2.0 * grid->nodes[static_cast<Eigen::Index>(k)]) / hbar;
        const double d = std::atan2(kappa, kk);
        amp(static_cast<Eigen::Index>(k), 0) =
            std::exp(Complex(0.0, -(kk * position + d))) * prof[static_cast<Eigen::Index>(k)];
        amp(static_cast<Eigen::Index>(k), 1) =
            Complex(0.0, 1.0) * std::exp(Complex(0.0, -kk * position)) *
            prof[static_cast<Eigen::Index>(k)];
    }
    return pure_state(std::move(grid), std::move(qnums), Eigen::VectorXcd::Zero(2), amp);
}

std::vector<double> build_times(const TimesSpec& spec) {
    if (spec.kind == "explicit") {
        require(!spec.values.empty(), "config: explicit times need values");
        return spec.values;
    }
    require(spec.count >= 2, "config: times.count must be >= 2");
    std::vector<double> t(static_cast<std::size_t>(spec.count));
    if (spec.kind == "linear") {
        for (int i = 0; i < spec.count; ++i)
            t[static_cast<std::size_t>(i)] =
                spec.t_min + (spec.t_max - spec.t_min) * i / (spec.count - 1);
        return t;
    }
    require(spec.kind == "log", "config: times.kind must be log|linear|explicit");
    require(spec.t_min > 0.0, "config: log time grids need t_min > 0");
    const double lr = std::log(spec.t_max / spec.t_min);
    for (int i = 0; i < spec.count; ++i)
        t[static_cast<std::size_t>(i)] = spec.t_min * std::exp(lr * i / (spec.count - 1));
    return t;
}

} // namespace declab
