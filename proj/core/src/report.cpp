#include "swipt/report.hpp"

#include <json.hpp>

#include <algorithm>

namespace swipt {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::iteration_limit: return "iteration_limit";
        case SolveStatus::infeasible: return "infeasible";
    }
    return "unknown";
}

double KktResidual::max() const {
    return std::max({stationarity, comp_slack_rate, comp_slack_power, dual_feas});
}

std::string report_to_json(const SolverReport& r, int indent) {
    nlohmann::json j{{"objective_trace", r.objective_trace},
                     {"ellipsoid_iters", r.ellipsoid_iters},
                     {"outer_iters", r.outer_iters},
                     {"alpha_evals", r.alpha_evals},
                     {"kkt_residuals", r.kkt_residuals},
                     {"wall_time_s", r.wall_time_s},
                     {"status", to_string(r.status)},
                     {"gp_iters", r.gp_iters},
                     {"barrier_rounds", r.barrier_rounds},
                     {"rejected_steps", r.rejected_steps}};
    if (!r.note.empty()) j["note"] = r.note;
    if (r.kkt) {
        j["kkt"] = {{"stationarity", r.kkt->stationarity},
                    {"comp_slack_rate", r.kkt->comp_slack_rate},
                    {"comp_slack_power", r.kkt->comp_slack_power},
                    {"dual_feas", r.kkt->dual_feas}};
    }
    return j.dump(indent);
}

}  // namespace swipt
