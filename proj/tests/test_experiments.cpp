#include "swipt/experiments.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace swipt;
namespace fs = std::filesystem;

TEST_CASE("parse_sweep: defaults, flags, and round trip") {
    const SweepSpec s = parse_sweep(R"({"axis": "power", "values": [0, 5, 10], "solver": "p3",
                                        "trials": 4, "flags": {"an_enabled": false}})");
    CHECK(s.axis == SweepAxis::power);
    CHECK(s.axis_unit == "dBW");
    CHECK(s.trials == 4);
    CHECK(s.solver == SolverKind::p3);
    CHECK_FALSE(s.flags.an_enabled);
    CHECK(s.output_dir == "results");

    const SweepSpec back = parse_sweep(sweep_to_json(s));
    CHECK(back.values == s.values);
    CHECK(back.solver == s.solver);
    CHECK(back.flags.an_enabled == s.flags.an_enabled);

    const SweepSpec t = parse_sweep(R"({"axis": "secrecy_target", "values": [1, 2], "solver": "p1"})");
    CHECK(t.axis_unit == "bits");
}

TEST_CASE("parse_sweep: rejects malformed specs") {
    CHECK_THROWS_AS(parse_sweep(R"({"axis": "time", "values": [1], "solver": "p1"})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_sweep(R"({"axis": "power", "values": [1], "solver": "p9"})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_sweep(R"({"axis": "power", "values": [], "solver": "p1"})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_sweep(R"({"axis": "power", "values": [3, 1], "solver": "p1"})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_sweep(R"({"axis": "power", "values": [1], "solver": "p1", "trials": 0})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        parse_sweep(R"({"axis": "power", "axis_unit": "W", "values": [0, 1], "solver": "p1"})"),
        std::invalid_argument);
    CHECK_THROWS_AS(
        parse_sweep(R"({"axis": "secrecy_target", "values": [-1, 1], "solver": "p1"})"),
        std::invalid_argument);
    CHECK_THROWS_AS(parse_sweep(R"({"values": [1], "solver": "p1"})"), std::invalid_argument);
}

TEST_CASE("shipped sweep configs parse") {
    const fs::path dir = fs::path(SWIPT_SOURCE_DIR) / "configs" / "sweeps";
    int count = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        CHECK_NOTHROW(load_sweep(entry.path().string()));
        ++count;
    }
    CHECK(count >= 8);
    CHECK_NOTHROW(load_scenario((fs::path(SWIPT_SOURCE_DIR) / "configs" / "single_er.json").string()));
    CHECK_NOTHROW(load_scenario((fs::path(SWIPT_SOURCE_DIR) / "configs" / "three_er.json").string()));
}

TEST_CASE("apply_seed_override reads SWIPT_SEED") {
    ScenarioConfig c = default_scenario(1);
    c.seed = 5;
    unsetenv("SWIPT_SEED");
    apply_seed_override(c);
    CHECK(c.seed == 5u);
    setenv("SWIPT_SEED", "991", 1);
    apply_seed_override(c);
    CHECK(c.seed == 991u);
    setenv("SWIPT_SEED", "12x", 1);
    CHECK_THROWS_AS(apply_seed_override(c), std::invalid_argument);
    unsetenv("SWIPT_SEED");
}

TEST_CASE("at_axis_value: unit handling") {
    const ScenarioConfig c = default_scenario(1);
    SweepSpec s;
    s.values = {1.0};
    CHECK(at_axis_value(c, s, 10.0).power == doctest::Approx(10.0));
    s.axis_unit = "dBm";
    CHECK(at_axis_value(c, s, 30.0).power == doctest::Approx(1.0));
    s.axis_unit = "W";
    CHECK(at_axis_value(c, s, 2.5).power == doctest::Approx(2.5));
}

TEST_CASE("csv: escaping and header") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_escape("two\nlines") == "\"two\nlines\"");

    ResultRow r;
    r.axis_value = 5.0;
    r.mean_energy = 0.25;
    r.feasible_trials = 3;
    const std::string plain = rows_to_csv({r}, false);
    CHECK(plain.rfind("axis_value,mean_energy,std_energy,feasible_trials,mean_wall_time_s\r\n", 0) == 0);
    CHECK(plain.find("5,0.25,0,3,0\r\n") != std::string::npos);
    const std::string kkt = rows_to_csv({r}, true);
    CHECK(kkt.find(",mean_kkt_residual\r\n") != std::string::npos);
    CHECK(kkt.find(",nan\r\n") != std::string::npos);
}

TEST_CASE("summarize: means over feasible trials only") {
    std::vector<TrialResult> t(3);
    t[0].feasible = true;
    t[0].energy = 1.0;
    t[1].feasible = true;
    t[1].energy = 3.0;
    t[2].wall_time_s = 3.0;
    const ResultRow r = summarize(0.0, t, false);
    CHECK(r.feasible_trials == 2);
    CHECK(r.mean_energy == doctest::Approx(2.0));
    CHECK(r.std_energy == doctest::Approx(std::sqrt(2.0)));
    CHECK(r.mean_wall_time_s == doctest::Approx(1.0));
    CHECK_FALSE(r.mean_kkt_residual.has_value());

    const ResultRow none = summarize(0.0, {t[2]}, true);
    CHECK(none.feasible_trials == 0);
    CHECK(std::isnan(none.mean_energy));
    REQUIRE(none.mean_kkt_residual.has_value());
    CHECK(std::isnan(*none.mean_kkt_residual));
}

TEST_CASE("run_sweep: deterministic, and artifacts land on disk") {
    const ScenarioConfig c = default_scenario(1);
    SweepSpec s;
    s.solver = SolverKind::p1;
    s.values = {10.0};
    s.trials = 1;
    const SweepResult a = run_sweep(c, s);
    const SweepResult b = run_sweep(c, s);
    REQUIRE(a.rows.size() == 1);
    CHECK(a.rows[0].mean_energy == b.rows[0].mean_energy);
    CHECK(a.trials[0][0].power_used <= c.power * (1.0 + 1e-9));
    if (a.trials[0][0].feasible) CHECK(a.trials[0][0].secrecy_margin >= -1e-6);

    // P1 and P2 only model a single ER.
    CHECK_THROWS_AS(run_sweep(default_scenario(3), s), std::invalid_argument);

    const fs::path dir = fs::temp_directory_path() / "swipt_sweep_artifacts_test";
    fs::remove_all(dir);
    write_sweep_artifacts(a, s, dir.string());
    CHECK(fs::exists(dir / "results.csv"));
    CHECK(fs::exists(dir / "reports" / "v0_t0.json"));
    std::ifstream in(dir / "results.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == rows_to_csv(a.rows, false));
    fs::remove_all(dir);
}
