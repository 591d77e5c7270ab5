#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "declab/delta_well.hpp"
#include "declab/dynamics.hpp"
#include "declab/io.hpp"
#include "declab/pointer_basis.hpp"
#include "declab/wigner_classical.hpp"

namespace declab::cli {

namespace {

namespace fs = std::filesystem;

std::string verdict(bool pass) { return pass ? "pass" : "FAIL"; }

struct Summary {
    std::ostringstream out;
    bool all_pass = true;

    void line(const std::string& key, const std::string& value) {
        out << key << ": " << value << "\n";
    }
    void value(const std::string& key, double v) { line(key, format_double(v)); }
    void gate(const std::string& key, double v, bool pass) {
        line(key, format_double(v) + " [" + verdict(pass) + "]");
        all_pass = all_pass && pass;
    }
    void write(const fs::path& path) { write_text_atomic(path, out.str()); }
};

double max_offdiag(const Eigen::MatrixXcd& m) {
    double v = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (i != j) v = std::max(v, std::abs(m(i, j)));
    return v;
}

} // namespace

// ------------------------------------------------------------------ evolve

int cmd_evolve(const ExperimentConfig& cfg) {
    const fs::path out(cfg.output_dir);
    auto grid = build_grid(cfg);
    auto qnums = build_qnums(cfg);
    const StateFn rho = build_state(cfg, grid, qnums);
    const ObservableFn obs = build_observable(cfg.observable, grid, qnums, cfg.seed);
    const std::vector<double> times = build_times(cfg.times);

    const DecayScan scan = decay_scan(rho, obs, times, cfg.dynamics);

    CsvWriter csv({"time", "expectation", "equilibrium_expectation", "deficit"});
    for (std::size_t i = 0; i < scan.times.size(); ++i)
        csv.add_row(std::vector<double>{scan.times[i], scan.values[i],
                                        scan.equilibrium_value, scan.deficits[i]});
    csv.write(out / "decay.csv");

    // dyadic verdict: suprema over octaves of the time grid must not increase
    bool dyadic_ok = true;
    if (scan.times.size() >= 4 && scan.times.front() > 0.0) {
        const double t0 = scan.times.front();
        std::vector<double> sup;
        for (std::size_t i = 0; i < scan.times.size(); ++i) {
            const auto octave =
                static_cast<std::size_t>(std::floor(std::log2(scan.times[i] / t0) + 1e-12));
            if (octave >= sup.size()) sup.resize(octave + 1, 0.0);
            sup[octave] = std::max(sup[octave], scan.deficits[i]);
        }
        for (std::size_t i = 0; i + 1 < sup.size(); ++i)
            if (sup[i + 1] > sup[i] && sup[i] > 1e-14) dyadic_ok = false;
    }

    Summary s;
    s.line("command", "evolve");
    s.value("initial_deficit", scan.deficits.front());
    s.value("final_deficit", scan.deficits.back());
    s.value("equilibrium_expectation", scan.equilibrium_value);
    s.line("dyadic_decrease", verdict(dyadic_ok));
    s.write(out / "evolve_summary.txt");
    return 0;
}

// ----------------------------------------------------------------- pointer

int cmd_pointer(const ExperimentConfig& cfg) {
    const fs::path out(cfg.output_dir);
    auto grid = build_grid(cfg);
    auto qnums = build_qnums(cfg);
    const StateFn rho = build_state(cfg, grid, qnums);
    const StateFn rho_star = equilibrium_state(rho);

    DiagonalizeOptions opts;
    opts.degeneracy_rel_tol = cfg.pointer.degeneracy_tol;
    if (cfg.pointer.secondary_axis) {
        ObservableSpec sec;
        sec.kind = "label_axis";
        sec.axis = cfg.pointer.secondary_axis_index;
        opts.secondary = build_observable(sec, grid, qnums, cfg.seed);
    }
    const PointerTransform U = diagonalize_blocks(rho_star, opts);
    const StateFn diag = transform_state(rho_star, U);

    // eigenvalue flows per node
    const std::size_t M = qnums->count();
    std::vector<std::string> header{"node", "omega"};
    for (std::size_t r = 0; r < M; ++r) header.push_back("lambda_" + std::to_string(r));
    CsvWriter flows(header);
    {
        std::vector<double> row;
        row = {-1.0, grid->omega0};
        for (std::size_t r = 0; r < M; ++r) row.push_back(U.bound_eigs[static_cast<Eigen::Index>(r)]);
        flows.add_row(row);
    }
    for (std::size_t k = 0; k < grid->n_nodes(); ++k) {
        std::vector<double> row{static_cast<double>(k), grid->nodes[static_cast<Eigen::Index>(k)]};
        for (std::size_t r = 0; r < M; ++r)
            row.push_back(U.cont_eigs(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(r)));
        flows.add_row(row);
    }
    flows.write(out / "pointer_eigenvalues.csv");

    // transform quality
    double offdiag = max_offdiag(diag.blocks().bound);
    double unit = (U.bound_U.adjoint() * U.bound_U -
                   Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(M),
                                              static_cast<Eigen::Index>(M)))
                      .cwiseAbs()
                      .maxCoeff();
    double identity_dev = (U.bound_U - Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(M),
                                                                  static_cast<Eigen::Index>(M)))
                              .cwiseAbs()
                              .maxCoeff();
    for (std::size_t k = 0; k < grid->n_nodes(); ++k) {
        offdiag = std::max(offdiag, max_offdiag(diag.blocks().cont[k]));
        unit = std::max(unit, (U.cont_U[k].adjoint() * U.cont_U[k] -
                               Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(M),
                                                          static_cast<Eigen::Index>(M)))
                                  .cwiseAbs()
                                  .maxCoeff());
        identity_dev = std::max(identity_dev,
                                (U.cont_U[k] - Eigen::MatrixXcd::Identity(
                                                   static_cast<Eigen::Index>(M),
                                                   static_cast<Eigen::Index>(M)))
                                    .cwiseAbs()
                                    .maxCoeff());
    }

    // moment table for H and the pointer observables
    const ObservableFn H = hamiltonian_observable(grid, qnums);
    const auto P = pointer_observables(U, qnums);
    CsvWriter moments({"sector", "level", "label", "observable", "order", "value", "expected"});
    double moment_defect = 0.0;
    const std::vector<std::size_t> probe_nodes{0, grid->n_nodes() / 2, grid->n_nodes() - 1};
    for (int n = 0; n <= cfg.pointer.max_moment_order; ++n) {
        for (std::size_t k : probe_nodes) {
            const double w = grid->nodes[static_cast<Eigen::Index>(k)];
            const double expected = std::pow(w, n);
            const double got = moment_check(k, 0, H, n);
            moment_defect = std::max(moment_defect,
                                     std::abs(got - expected) / std::max(1.0, std::abs(expected)));
            moments.add_row(std::vector<std::string>{
                "continuum", format_double(w), "0", "H", std::to_string(n),
                format_double(got), format_double(expected)});
        }
        const double expected0 = std::pow(grid->omega0, n);
        const double got0 = moment_check(BoundSector{}, 0, H, n);
        moment_defect = std::max(moment_defect,
                                 std::abs(got0 - expected0) / std::max(1.0, std::abs(expected0)));
        moments.add_row(std::vector<std::string>{"bound", format_double(grid->omega0), "0", "H",
                                                 std::to_string(n), format_double(got0),
                                                 format_double(expected0)});
        for (std::size_t axis = 0; axis < P.size(); ++axis) {
            const ObservableFn Pd = transform_observable(P[axis], U);
            for (std::size_t r = 0; r < M; ++r) {
                const double expected = std::pow(static_cast<double>(qnums->labels[r][axis]), n);
                const double got = moment_check(grid->n_nodes() / 2, r, Pd, n);
                moment_defect = std::max(
                    moment_defect, std::abs(got - expected) / std::max(1.0, std::abs(expected)));
                moments.add_row(std::vector<std::string>{
                    "continuum", "node_mid", std::to_string(r), "P_" + std::to_string(axis),
                    std::to_string(n), format_double(got), format_double(expected)});
            }
        }
    }
    moments.write(out / "pointer_moments.csv");

    // commutator expectations against random observables
    Prng rng(cfg.seed);
    double comm_worst = 0.0;
    CsvWriter comm({"trial", "abs_commutator_expectation"});
    for (int i = 0; i < cfg.pointer.n_random_observables; ++i) {
        const ObservableFn O = random_smooth_observable(rng, grid, qnums);
        const ObservableFn Pd = transform_observable(P[0], U);
        const double v = std::abs(commutator_expectation(diag, Pd, O));
        comm_worst = std::max(comm_worst, v);
        comm.add_row(std::vector<double>{static_cast<double>(i), v});
    }
    comm.write(out / "pointer_commutators.csv");

    Summary s;
    s.line("command", "pointer");
    s.gate("max_offdiagonal_after_transform", offdiag, offdiag < 1e-12);
    s.gate("max_unitarity_defect", unit, unit < 1e-12);
    s.value("max_deviation_from_identity", identity_dev);
    s.value("min_tracking_overlap", U.min_overlap);
    s.gate("max_moment_defect", moment_defect, moment_defect <= 1e-12);
    s.gate("max_commutator_expectation", comm_worst, comm_worst == 0.0);
    s.write(out / "pointer_summary.txt");
    return s.all_pass ? 0 : 2;
}

// ------------------------------------------------------------------ wigner

int cmd_wigner(const ExperimentConfig& cfg) {
    const fs::path out(cfg.output_dir);
    auto grid = build_grid(cfg);
    auto qnums = build_qnums(cfg);
    const StateFn rho = build_state(cfg, grid, qnums);

    const DeltaWellModel model = deltawell_model(cfg.wigner.model_g, cfg.wigner.hbar);
    PhaseSpaceGrid pgrid;
    pgrid.q_half = cfg.wigner.q_half;
    pgrid.n_q = cfg.wigner.n_q;
    pgrid.p_half = cfg.wigner.p_half;
    pgrid.n_p = cfg.wigner.n_p;
    pgrid.lambda_half = cfg.wigner.lambda_half;
    pgrid.hbar = cfg.wigner.hbar;

    const PositionKernel K = position_kernel(rho, model, pgrid);
    const WignerDensity W = wigner_state(K, pgrid);

    // density matrix CSV: leading header row carries the p axis, each data
    // row starts with its q value
    {
        std::vector<std::string> header{"q\\p"};
        for (int j = 0; j < pgrid.n_p; ++j) header.push_back(format_double(pgrid.p_at(j)));
        CsvWriter csv(header);
        for (int i = 0; i < pgrid.n_q; ++i) {
            std::vector<double> row{pgrid.q_at(i)};
            for (int j = 0; j < pgrid.n_p; ++j) row.push_back(W.W(i, j));
            csv.add_row(row);
        }
        csv.write(out / "wigner_density.csv");
    }

    // pairing-comparison table: displaced packets (kernels clear the decay
    // validation away from the potential kink) against smooth energy-diagonal
    // observables
    Prng rng(cfg.seed);
    double pairing_worst = 0.0;
    CsvWriter pairs({"pair", "phase_space_value", "spectral_value", "abs_difference"});
    for (int i = 0; i < cfg.wigner.n_pairs; ++i) {
        const StateFn pr = build_moving_packet(grid, qnums, rng.uniform(2.95, 3.15),
                                               rng.uniform(0.33, 0.35), rng.uniform(6.3, 7.3),
                                               cfg.wigner.model_g, cfg.wigner.hbar);

        ComponentBlocks ob = ComponentBlocks::zero(grid->n_nodes(), 2);
        const Eigen::VectorXcd prof =
            gaussian_amplitude(*grid, rng.uniform(3.5, 5.5), rng.uniform(1.0, 1.6));
        const double mix = rng.uniform(-0.4, 0.4);
        for (std::size_t k = 0; k < grid->n_nodes(); ++k) {
            const double v = std::abs(prof[static_cast<Eigen::Index>(k)]);
            Eigen::MatrixXcd mm(2, 2);
            mm << v, mix * v, mix * v, 0.7 * v;
            ob.cont[k] = mm;
        }
        ob.bound = rng.uniform(0.1, 0.6) * Eigen::MatrixXcd::Identity(2, 2);
        const ObservableFn O = ObservableFn::create(grid, qnums, std::move(ob), true);

        const double spectral = dual_pairing(pr, O).real();
        const WignerDensity Wr = wigner_state(position_kernel(pr, model, pgrid), pgrid);
        const SymbolTable sO = wigner_observable(O, model, pgrid, LambdaWindow::Off);
        const double phase = phase_space_pairing(Wr, sO, pgrid);
        pairing_worst = std::max(pairing_worst, std::abs(phase - spectral));
        pairs.add_row(std::vector<double>{static_cast<double>(i), phase, spectral,
                                          std::abs(phase - spectral)});
    }
    pairs.write(out / "wigner_pairings.csv");

    // hbar-scaling residuals on the dedicated probe setup: the transport
    // study needs a packet overlapping the potential, the product study uses
    // windowed symbols at small coupling
    const auto& sc = cfg.wigner.scaling;
    ScalingReport transport, product;
    {
        auto tgrid = make_spectrum_grid(-0.5 * sc.coupling * sc.coupling, sc.omega_max,
                                        sc.n_panels, sc.panel_order);
        const StateFn probe = build_moving_packet(tgrid, qnums, sc.packet_k_center,
                                                  sc.packet_k_width, sc.packet_position,
                                                  sc.coupling, 1.0);
        PhaseSpaceGrid tpg;
        tpg.q_half = sc.q_half;
        tpg.n_q = sc.n_q;
        tpg.p_half = sc.p_half;
        tpg.n_p = sc.n_p;
        tpg.lambda_half = sc.lambda_half;
        transport = moyal_vs_poisson_residual(probe, deltawell_model(sc.coupling), tpg,
                                              cfg.wigner.hbar_list, sc.q_cut);

        auto pgrid2 = make_spectrum_grid(-0.5 * sc.product_coupling * sc.product_coupling,
                                         sc.product_omega_max, sc.product_n_panels,
                                         sc.panel_order);
        PhaseSpaceGrid ppg;
        ppg.q_half = sc.product_q_half;
        ppg.n_q = sc.product_n_q;
        ppg.p_half = sc.product_p_half;
        ppg.n_p = sc.product_n_p;
        ppg.lambda_half = sc.product_lambda_half;
        const ObservableFn Hs = hamiltonian_observable(pgrid2, qnums);
        product = product_correspondence_residual(Hs, Hs, deltawell_model(sc.product_coupling),
                                                  ppg, cfg.wigner.hbar_list, sc.product_q_cut);
    }
    {
        CsvWriter csv({"hbar", "transport_residual", "transport_reference",
                       "product_residual", "product_reference"});
        for (std::size_t i = 0; i < transport.points.size(); ++i)
            csv.add_row(std::vector<double>{transport.points[i].hbar,
                                            transport.points[i].residual,
                                            transport.points[i].reference,
                                            product.points[i].residual,
                                            product.points[i].reference});
        csv.write(out / "wigner_scaling.csv");
    }

    // classical equilibrium ensemble and its moments
    const StateFn rho_star = equilibrium_state(rho);
    const PointerTransform U = diagonalize_blocks(rho_star);
    const StateFn diag = transform_state(rho_star, U);
    const ClassicalEnsemble ens = classical_equilibrium_density(diag, U, model);
    bool weights_ok = true;
    {
        CsvWriter csv({"kind", "energy", "label_index", "weight"});
        for (const auto& part : ens.particles) {
            weights_ok = weights_ok && part.weight >= 0.0;
            csv.add_row(std::vector<std::string>{part.bound ? "bound" : "continuum",
                                                 format_double(part.energy),
                                                 std::to_string(part.label),
                                                 format_double(part.weight)});
        }
        csv.write(out / "classical_ensemble.csv");
    }
    double moment_defect = 0.0;
    {
        CsvWriter csv({"observable", "order", "aggregate"});
        for (int n = 0; n <= 3; ++n) {
            const MomentTable mh = classical_moments(ens, HamiltonianMoment{}, n);
            csv.add_row(std::vector<std::string>{"H", std::to_string(n),
                                                 format_double(mh.aggregate)});
            for (std::size_t i = 0; i < ens.particles.size(); ++i) {
                const double x = ens.particles[i].energy;
                moment_defect = std::max(moment_defect,
                                         std::abs(mh.per_particle[i] - std::pow(x, n)));
            }
            for (std::size_t axis = 0; axis < qnums->axes(); ++axis) {
                const MomentTable mp = classical_moments(ens, axis, n);
                csv.add_row(std::vector<std::string>{"P_" + std::to_string(axis),
                                                     std::to_string(n),
                                                     format_double(mp.aggregate)});
            }
        }
        csv.write(out / "classical_moments.csv");
    }

    Summary s;
    s.line("command", "wigner");
    s.gate("wigner_normalization", W.normalization, std::abs(W.normalization - 1.0) < 1e-6);
    s.gate("max_imag_residue", W.max_imag_residue, W.max_imag_residue < 1e-10);
    s.value("kernel_trace", K.trace);
    s.gate("max_pairing_difference", pairing_worst, pairing_worst < 1e-4);
    s.gate("transport_slope", transport.slope, transport.slope >= 0.9);
    s.gate("product_slope", product.slope, product.slope >= 0.9);
    s.gate("ensemble_weight_sum", ens.total_weight, std::abs(ens.total_weight - 1.0) < 1e-10);
    s.line("ensemble_weights_nonnegative", verdict(weights_ok));
    s.gate("ensemble_moment_defect", moment_defect, moment_defect < 1e-12);
    s.write(out / "wigner_summary.txt");
    return s.all_pass && weights_ok ? 0 : 2;
}

// ------------------------------------------------------------------- check

int cmd_check(const ExperimentConfig& cfg) {
    const fs::path out(cfg.output_dir);
    auto grid = build_grid(cfg);
    auto qnums = build_qnums(cfg);
    Prng rng(cfg.seed);

    nlohmann::ordered_json report;
    report["command"] = "check";
    report["seed"] = cfg.seed;
    bool all_pass = true;
    auto gate = [&](const std::string& name, double value, double threshold, bool pass) {
        nlohmann::ordered_json entry;
        entry["value"] = format_double(value);
        entry["threshold"] = format_double(threshold);
        entry["pass"] = pass;
        report["checks"][name] = entry;
        all_pass = all_pass && pass;
    };

    // quadrature consistency
    {
        double acc = 0.0;
        for (Eigen::Index k = 0; k < grid->nodes.size(); ++k) acc += grid->weights[k];
        const double defect = std::abs(acc - grid->omega_max) / grid->omega_max;
        gate("quadrature_weight_sum", defect, 1e-12, defect <= 1e-12);
    }

    // state closure under construction, evolution, and projection
    {
        double herm = 0.0, norm = 0.0, neg = 0.0;
        for (int i = 0; i < cfg.check.n_random_states; ++i) {
            StateFn rho = random_smooth_state(rng, grid, qnums);
            if (cfg.check.break_hermiticity && i == 0) {
                ComponentBlocks b = rho.blocks();
                b.bound(0, 1) += Complex(0.5, 0.0);
                rho = StateFn::unchecked(grid, qnums, std::move(b));
            }
            const ValidationReport base = validate_state(rho);
            herm = std::max(herm, base.hermiticity_defect);
            norm = std::max(norm, base.normalization_defect);
            neg = std::min(neg, base.negativity_defect);
            // evolution and projection only accept hermitian inputs
            if (!base.hermiticity_pass) continue;
            for (const StateFn& probe : {evolve_state(rho, 3.7), equilibrium_state(rho)}) {
                const ValidationReport rep = validate_state(probe);
                herm = std::max(herm, rep.hermiticity_defect);
                norm = std::max(norm, rep.normalization_defect);
                neg = std::min(neg, rep.negativity_defect);
            }
        }
        gate("state_hermiticity", herm, kHermiticityTol, herm <= kHermiticityTol);
        gate("state_normalization", norm, kNormalizationTol, norm <= kNormalizationTol);
        gate("state_negativity", neg, kNegativityTol, neg >= kNegativityTol);
    }

    // expectation agreement between the two quadrature routes
    {
        double worst = 0.0;
        for (int i = 0; i < 3; ++i) {
            const StateFn rho = random_smooth_state(rng, grid, qnums);
            const ObservableFn O = random_smooth_observable(rng, grid, qnums);
            const double t = rng.uniform(0.05, 0.3);
            DynamicsOptions plain{QuadratureMode::Plain, 64};
            DynamicsOptions filon{QuadratureMode::Filon, 64};
            const double a = expectation(rho, O, t, plain);
            const double b = expectation(rho, O, t, filon);
            worst = std::max(worst, std::abs(a - b));
        }
        gate("plain_vs_filon_expectation", worst, 1e-8, worst <= 1e-8);
    }

    // equilibrium fixed point
    {
        double worst = 0.0;
        for (int i = 0; i < cfg.check.n_random_states; ++i) {
            const StateFn rho = equilibrium_state(random_smooth_state(rng, grid, qnums));
            const StateFn moved = evolve_state(rho, rng.uniform(1.0, 40.0));
            worst = std::max(worst,
                             (moved.blocks().cont_cont - rho.blocks().cont_cont)
                                 .cwiseAbs()
                                 .maxCoeff());
            const StateDerivative d = liouvillian_apply(rho);
            worst = std::max(worst, d.blocks.cont_cont.cwiseAbs().maxCoeff());
        }
        gate("equilibrium_fixed_point", worst, 0.0, worst == 0.0);
    }

    // pointer construction quality
    {
        double offdiag = 0.0, unit = 0.0, pairing = 0.0;
        for (int i = 0; i < 5; ++i) {
            const StateFn rho = random_smooth_state(rng, grid, qnums);
            const PointerTransform U = diagonalize_blocks(equilibrium_state(rho));
            const StateFn diag = transform_state(equilibrium_state(rho), U);
            offdiag = std::max(offdiag, max_offdiag(diag.blocks().bound));
            for (std::size_t k = 0; k < grid->n_nodes(); ++k)
                offdiag = std::max(offdiag, max_offdiag(diag.blocks().cont[k]));
            const auto M = static_cast<Eigen::Index>(qnums->count());
            unit = std::max(unit, (U.bound_U.adjoint() * U.bound_U -
                                   Eigen::MatrixXcd::Identity(M, M))
                                      .cwiseAbs()
                                      .maxCoeff());
            const ObservableFn O = random_smooth_observable(rng, grid, qnums);
            pairing = std::max(pairing,
                               std::abs(dual_pairing(rho, O) -
                                        dual_pairing(transform_state(rho, U),
                                                     transform_observable(O, U))));
        }
        gate("pointer_offdiagonal", offdiag, 1e-12, offdiag < 1e-12);
        gate("pointer_unitarity", unit, 1e-12, unit < 1e-12);
        gate("pointer_pairing_invariance", pairing, 1e-12, pairing < 1e-12);
    }

    // moment identities
    {
        const ObservableFn H = hamiltonian_observable(grid, qnums);
        double worst = 0.0;
        for (int n = 0; n <= 8; ++n) {
            const std::size_t k = grid->n_nodes() / 3;
            const double w = grid->nodes[static_cast<Eigen::Index>(k)];
            const double defect = std::abs(moment_check(k, 0, H, n) - std::pow(w, n)) /
                                  std::max(1.0, std::abs(std::pow(w, n)));
            worst = std::max(worst, defect);
        }
        gate("moment_identities", worst, 1e-12, worst <= 1e-12);
    }

    write_text_atomic(out / "check_report.json", report.dump(2) + "\n");
    return all_pass ? 0 : 2;
}

} // namespace declab::cli
