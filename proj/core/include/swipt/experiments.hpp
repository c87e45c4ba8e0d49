#pragma once

#include "swipt/channel.hpp"
#include "swipt/report.hpp"

#include <optional>
#include <string>
#include <vector>

namespace swipt {

enum class SweepAxis { power, secrecy_target };
enum class SolverKind { p1, p2, p3 };

struct SweepFlags {
    bool an_enabled = true;        // p3: V is optimized
    bool we_cancellation = false;  // p3: the IR removes the energy signal
    bool force_we_zero = false;    // p2, p3
    bool force_v_zero = false;     // p3; same effect as an_enabled = false
};

struct SweepSpec {
    SweepAxis axis = SweepAxis::power;
    // power: "dBW" (default), "dBm" or "W"; secrecy_target: "bits".
    std::string axis_unit = "dBW";
    std::vector<double> values;
    int trials = 1;
    SolverKind solver = SolverKind::p1;
    SweepFlags flags;
    std::string output_dir = "results";

    void validate() const;  // throws std::invalid_argument
};

SweepSpec parse_sweep(const std::string& json_text);
SweepSpec load_sweep(const std::string& path);
std::string sweep_to_json(const SweepSpec& spec);

// Applies the SWIPT_SEED environment override, if set.
void apply_seed_override(ScenarioConfig& cfg);

// cfg with the sweep axis set to `value` (interpreted in spec.axis_unit).
ScenarioConfig at_axis_value(const ScenarioConfig& cfg, const SweepSpec& spec, double value);

struct TrialResult {
    int trial = 0;
    bool feasible = false;
    double energy = 0.0;       // watts
    double wall_time_s = 0.0;  // solver time only
    // True (not surrogate) secrecy rate minus target in nats, worst ER, and
    // total transmit power of the returned covariances. Zero when infeasible.
    double secrecy_margin = 0.0;
    double power_used = 0.0;
    SolverReport report;
};

// One solve on draw `trial` of cfg (channel draws do not depend on the axis).
TrialResult run_trial(const ScenarioConfig& cfg, const SweepSpec& spec, int trial);

struct ResultRow {
    double axis_value = 0.0;  // as configured, in spec.axis_unit
    double mean_energy = 0.0;
    double std_energy = 0.0;
    int feasible_trials = 0;
    double mean_wall_time_s = 0.0;
    std::optional<double> mean_kkt_residual;  // p3 only
};

// Means over feasible trials; std is the sample deviation (0 below 2 trials).
ResultRow summarize(double axis_value, const std::vector<TrialResult>& trials, bool with_kkt);

struct SweepResult {
    std::vector<ResultRow> rows;
    std::vector<std::vector<TrialResult>> trials;  // [axis index][trial]
};

// threads <= 0 uses the hardware concurrency.
SweepResult run_sweep(const ScenarioConfig& cfg, const SweepSpec& spec, int threads = 1);

// Writes <dir>/results.csv and <dir>/reports/v<i>_t<j>.json.
void write_sweep_artifacts(const SweepResult& result, const SweepSpec& spec,
                           const std::string& dir);

std::string csv_escape(const std::string& field);
std::string rows_to_csv(const std::vector<ResultRow>& rows, bool with_kkt);

const char* to_string(SweepAxis a);
const char* to_string(SolverKind s);

}  // namespace swipt
