// declab — spectral decoherence laboratory command line
//
//   declab evolve  --config cfg.json [--out DIR] [--seed N]
//   declab pointer --config cfg.json [--out DIR] [--seed N]
//   declab wigner  --config cfg.json [--out DIR] [--seed N]
//   declab check   --config cfg.json [--out DIR] [--seed N]
//
// Exit codes: 0 success, 1 configuration/validation failure, 2 numerical
// check failure.
#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

#include "commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"spectral decoherence laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::int64_t seed_override = -1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment configuration (JSON)")
            ->required();
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--seed", seed_override, "seed override for randomized suites");
    };
    CLI::App* evolve = app.add_subcommand("evolve", "time scans of mean values and deficits");
    CLI::App* pointer = app.add_subcommand("pointer", "pointer basis construction and checks");
    CLI::App* wigner = app.add_subcommand("wigner", "phase-space transforms and classical limit");
    CLI::App* check = app.add_subcommand("check", "full property suite, machine-readable report");
    for (CLI::App* sub : {evolve, pointer, wigner, check}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    declab::ExperimentConfig cfg;
    try {
        cfg = declab::ExperimentConfig::load(config_path);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 1;
    }

    try {
        if (evolve->parsed()) return declab::cli::cmd_evolve(cfg);
        if (pointer->parsed()) return declab::cli::cmd_pointer(cfg);
        if (wigner->parsed()) return declab::cli::cmd_wigner(cfg);
        if (check->parsed()) return declab::cli::cmd_check(cfg);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 2;
    }
    return 1;
}
