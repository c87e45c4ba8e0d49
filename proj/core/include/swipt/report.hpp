#pragma once

#include <optional>
#include <string>
#include <vector>

namespace swipt {

enum class SolveStatus { converged, iteration_limit, infeasible };

const char* to_string(SolveStatus s);

struct KktResidual {
    double stationarity = 0.0;
    double comp_slack_rate = 0.0;
    double comp_slack_power = 0.0;
    double dual_feas = 0.0;

    double max() const;
};

struct SolverReport {
    std::vector<double> objective_trace;  // harvested energy per outer iteration, watts
    std::vector<int> ellipsoid_iters;     // one entry per ellipsoid run
    int outer_iters = 0;
    int alpha_evals = 0;
    std::vector<double> kkt_residuals;
    double wall_time_s = 0.0;
    SolveStatus status = SolveStatus::converged;
    std::optional<KktResidual> kkt;

    // diagnostics beyond the stable schema
    int gp_iters = 0;
    int barrier_rounds = 0;
    int rejected_steps = 0;
    std::string note;
};

std::string report_to_json(const SolverReport& r, int indent = 2);

}  // namespace swipt
