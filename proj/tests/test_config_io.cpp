#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "declab/config.hpp"
#include "declab/io.hpp"

using namespace declab;

TEST_CASE("config parses, builds, and rejects unknown keys") {
    nlohmann::json j = nlohmann::json::parse(R"({
        "seed": 7,
        "grid": {"omega0": -0.5, "omega_max": 10.0, "n_panels": 8, "panel_order": 6},
        "labels": {"axes": [[1, -1]]},
        "state": {
            "bound": [[0.5477225575051661, 0.0]],
            "continuum": [{"kind": "gaussian", "label": 0, "center": 2.0, "width": 0.25,
                           "coeff": [0.8366600265340756, 0.0]}]
        },
        "observable": {"kind": "cc_uniform", "label_row": 0, "label_col": 0},
        "times": {"kind": "linear", "t_min": 0.0, "t_max": 20.0, "count": 5},
        "dynamics": {"mode": "filon", "filon_segments": 48}
    })");
    const ExperimentConfig cfg = ExperimentConfig::from_json(j);
    CHECK(cfg.seed == 7);
    CHECK(cfg.n_panels == 8);

    auto grid = build_grid(cfg);
    auto qn = build_qnums(cfg);
    const StateFn rho = build_state(cfg, grid, qn);
    CHECK(validate_state(rho).pass());
    const ObservableFn O = build_observable(cfg.observable, grid, qn);
    CHECK(O.self_adjoint());

    const auto times = build_times(cfg.times);
    REQUIRE(times.size() == 5);
    CHECK(times.front() == 0.0);
    CHECK(times.back() == 20.0);

    // unknown keys anywhere are rejected
    nlohmann::json bad = j;
    bad["grid"]["typo"] = 1;
    CHECK_THROWS(ExperimentConfig::from_json(bad));
    nlohmann::json bad2 = j;
    bad2["surprise"] = true;
    CHECK_THROWS(ExperimentConfig::from_json(bad2));

    // profiles with truncation-crossing mass are rejected
    nlohmann::json leaky = j;
    leaky["state"]["continuum"][0]["center"] = 9.9;
    leaky["state"]["continuum"][0]["width"] = 2.0;
    CHECK_THROWS(build_state(ExperimentConfig::from_json(leaky), grid, qn));
}

TEST_CASE("log time grids are increasing and exactly sized") {
    TimesSpec t;
    t.kind = "log";
    t.t_min = 0.1;
    t.t_max = 100.0;
    t.count = 13;
    const auto times = build_times(t);
    REQUIRE(times.size() == 13);
    for (std::size_t i = 0; i + 1 < times.size(); ++i) CHECK(times[i] < times[i + 1]);
    CHECK(times.front() == doctest::Approx(0.1));
    CHECK(times.back() == doctest::Approx(100.0));
}

TEST_CASE("csv output is layout-stable and atomic writes land") {
    CsvWriter csv({"a", "b"});
    csv.add_row(std::vector<double>{1.0, 0.5});
    csv.add_row(std::vector<double>{-2.25, 1e-17});
    const std::string expect = "a,b\n1,0.5\n-2.25,1.0000000000000001e-17\n";
    CHECK(csv.str() == expect);

    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "declab_io_test";
    fs::remove_all(dir);
    csv.write(dir / "x.csv");
    std::ifstream in(dir / "x.csv");
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(content == expect);
    CHECK_FALSE(fs::exists(dir / "x.csv.tmp"));
    fs::remove_all(dir);
}

TEST_CASE("doubles format deterministically") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-0.0) == "-0");
}
