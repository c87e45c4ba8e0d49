#pragma once

#include "swipt/channel.hpp"
#include "swipt/wsehm_p3.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace swipt {

// Tolerance profile for the KKT gate: tight GP stopping plus spectral steps,
// since the default schedule stops well before the barrier subproblems are
// centered.
SolverTolerances kkt_profile(SolverTolerances base = {});
// Profile for the P2 / reduced-P3 comparison: both runs driven to a tight
// stationary point so the comparison measures the formulations, not the
// stopping rules.
SolverTolerances reduction_profile(SolverTolerances base = {});

struct ValidationOptions {
    bool fast = false;  // reduced trial counts, same gates and tolerances
    std::uint64_t seed = 1;
    int threads = 1;
    std::vector<int> only;  // gate ids to run; empty runs all
    // Applied to every analytic gradient before the finite-difference
    // comparison. Tests use it as a negative control.
    std::function<void(TripleGradient&)> gradient_hook;
    std::ostream* log = nullptr;  // one line per gate as it finishes
};

struct GateResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct ValidationReport {
    std::vector<GateResult> gates;
    bool passed() const;
    std::string to_json() const;
};

// Runs the acceptance gates in order:
//  1 gradient_fidelity   2 projection        3 ellipsoid_contract
//  4 monotone_ascent     5 true_feasibility  6 energy_beam_structure
//  7 kkt_gate            8 reduction         9 tiny_grid
// 10 trends             11 two_start
// Gate 5 audits every solution produced by the other gates that ran.
ValidationReport run_validation(const ValidationOptions& opts = {});

std::string format_gate_line(const GateResult& g);

}  // namespace swipt
