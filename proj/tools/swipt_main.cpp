#include "swipt/experiments.hpp"
#include "swipt/validation.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

int run_command(const std::string& config_path, const std::string& sweep_path,
                const std::string& out_override, int threads) {
    swipt::ScenarioConfig cfg = swipt::load_scenario(config_path);
    swipt::apply_seed_override(cfg);
    const swipt::SweepSpec sweep = swipt::load_sweep(sweep_path);
    const std::string out = out_override.empty() ? sweep.output_dir : out_override;

    const swipt::SweepResult result = swipt::run_sweep(cfg, sweep, threads);
    swipt::write_sweep_artifacts(result, sweep, out);
    std::cout << swipt::rows_to_csv(result.rows, sweep.solver == swipt::SolverKind::p3);

    int empty_rows = 0;
    for (const auto& row : result.rows) {
        if (row.feasible_trials == 0) {
            ++empty_rows;
            std::cerr << "swipt: no feasible trial at axis value " << row.axis_value << " "
                      << sweep.axis_unit << "\n";
        }
    }
    std::cerr << "swipt: wrote " << out << "/results.csv and " << out << "/reports/\n";
    return empty_rows > 0 ? 3 : 0;
}

int validate_command(bool fast, int threads, std::uint64_t seed, const std::vector<int>& gates,
                     const std::string& json_path) {
    swipt::ValidationOptions opts;
    opts.fast = fast;
    opts.threads = threads;
    opts.seed = seed;
    opts.only = gates;
    opts.log = &std::cerr;
    const swipt::ValidationReport report = swipt::run_validation(opts);
    const std::string json = report.to_json();
    if (json_path.empty()) {
        std::cout << json << "\n";
    } else {
        std::ofstream(json_path) << json << "\n";
    }
    for (const auto& g : report.gates)
        if (!g.passed) std::cerr << "swipt: gate failed: " << g.name << "\n";
    return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-harvesting maximization solvers for secure MIMO SWIPT links"};
    app.require_subcommand(1);

    std::string config_path, sweep_path, out_dir;
    int threads = 1;
    auto* run = app.add_subcommand("run", "Run a Monte Carlo sweep and write CSV + JSON reports");
    run->add_option("--config", config_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
    run->add_option("--sweep", sweep_path, "Sweep JSON")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Output directory (overrides the sweep's output_dir)");
    run->add_option("--threads", threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

    bool fast = false;
    int vthreads = 1;
    std::uint64_t seed = 1;
    std::vector<int> gates;
    std::string json_path;
    auto* validate = app.add_subcommand("validate", "Run the oracle and acceptance gates");
    validate->add_flag("--fast", fast, "Reduced trial counts");
    validate->add_option("--threads", vthreads, "Worker threads")->check(CLI::PositiveNumber);
    validate->add_option("--seed", seed, "Base seed (SWIPT_SEED overrides)");
    validate->add_option("--gate", gates, "Run only these gate ids")->check(CLI::Range(1, 11));
    validate->add_option("--json", json_path, "Write the JSON summary here instead of stdout");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run) return run_command(config_path, sweep_path, out_dir, threads);
        swipt::ScenarioConfig seed_holder;
        seed_holder.seed = seed;
        swipt::apply_seed_override(seed_holder);
        return validate_command(fast, vthreads, seed_holder.seed, gates, json_path);
    } catch (const std::exception& e) {
        std::cerr << "swipt: error: " << e.what() << "\n";
        return 2;
    }
}
