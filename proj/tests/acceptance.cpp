// Runs every acceptance criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion. Exit status is nonzero if any criterion fails.

#include "swipt/validation.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <thread>

int main(int argc, char** argv) {
    CLI::App app{"swipt acceptance criteria"};
    swipt::ValidationOptions opts;
    std::string json_out;
    opts.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    app.add_flag("--fast", opts.fast, "Reduced trial counts (same gates and tolerances)");
    app.add_option("--seed", opts.seed, "Base seed for channel draws");
    app.add_option("--threads", opts.threads, "Worker threads");
    app.add_option("--only", opts.only, "Criterion ids to run");
    app.add_option("--json", json_out, "Write the report as JSON");
    CLI11_PARSE(app, argc, argv);

    const swipt::ValidationReport report = swipt::run_validation(opts);
    for (const auto& g : report.gates) std::cout << swipt::format_gate_line(g) << '\n';
    int failed = 0;
    for (const auto& g : report.gates) failed += g.passed ? 0 : 1;
    std::cout << (report.gates.size() - failed) << "/" << report.gates.size()
              << " criteria passed\n";
    if (!json_out.empty()) std::ofstream(json_out) << report.to_json() << '\n';
    return failed == 0 ? 0 : 1;
}
