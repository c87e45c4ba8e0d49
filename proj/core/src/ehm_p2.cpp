#include "swipt/ehm_p2.hpp"

#include "swipt/gp.hpp"
#include "swipt/metrics.hpp"

#include <chrono>
#include <cmath>

namespace swipt {

namespace {

struct Sequence {
    Blocks x;
    double energy = 0.0;
    std::vector<double> rounds;
    SolverReport report;
    int gp_decreases = 0;
};

// Sequential convex rounds on the two-term Taylor surrogate from `start`.
Sequence run_sequence(const P2Problem& p, const SolverTolerances& tol, bool we_zero,
                      Blocks x) {
    const Eigen::Index n = p.h.rows();
    // Energy in units of the best single-beam gain, so the objective is O(P).
    const double g1 = std::max(p.top_gain(), 1e-300);
    const CMatrix ggh = p.g * p.g.adjoint() / g1;
    FeasibleSetSpec spec{p.power, {static_cast<int>(n), static_cast<int>(n)}, {false, we_zero}};
    BarrierSchedule sched{tol.t0, tol.mu_t, tol.xi2};
    GpOptions gpo;
    gpo.q1 = tol.q1_factor * p.power;
    gpo.spectral_step = tol.spectral_step;
    gpo.xi1 = tol.xi1;
    gpo.max_iters = tol.max_gp_iters;
    gpo.armijo = {tol.armijo_beta, tol.armijo_sigma, 60};

    Sequence seq;
    if (we_zero) x[1].setZero();
    double energy = p.energy_of(x[0] + x[1]);
    seq.rounds.push_back(energy);
    seq.report.status = SolveStatus::iteration_limit;

    for (int m = 1; m <= tol.max_p2_rounds; ++m) {
        seq.report.outer_iters = m;
        const CMatrix bh = log_det_gain_gradient(p.h, x[1]);
        const CMatrix bg = log_det_gain_gradient(p.g, x[0]);
        const double base = -log_det_gain(p.h, x[1]) + inner(bh, x[1]) -
                            log_det_gain(p.g, x[0]) + inner(bg, x[0]) - p.c0;
        BarrierProblem bp;
        bp.objective = [&](const Blocks& y) { return trace_real(ggh * (y[0] + y[1])); };
        bp.objective_gradient = [&](const Blocks&) { return Blocks{ggh, ggh}; };
        bp.slacks = [&](const Blocks& y) {
            return std::vector<double>{log_det_gain(p.h, y[0] + y[1]) - inner(bh, y[1]) -
                                       inner(bg, y[0]) + base};
        };
        bp.weighted_slack_gradient = [&](const Blocks& y, const std::vector<double>& w) {
            const CMatrix omega = log_det_gain_gradient(p.h, y[0] + y[1]);
            return Blocks{w[0] * (omega - bg), w[0] * (omega - bh)};
        };
        BarrierResult br = barrier_outer(bp, sched, 1, spec, x, gpo);
        seq.report.gp_iters += br.gp_iterations;
        seq.report.barrier_rounds += br.t_updates;
        seq.gp_decreases += br.gp_decreases;
        const double next = p.energy_of(br.x[0] + br.x[1]);
        if (next < energy) {
            ++seq.report.rejected_steps;
            seq.report.status = SolveStatus::converged;
            break;
        }
        const double rel = (next - energy) / std::max(energy, 1e-300);
        x = std::move(br.x);
        energy = next;
        seq.rounds.push_back(energy);
        if (rel < tol.p2_rel_tol) {
            seq.report.status = SolveStatus::converged;
            break;
        }
    }
    seq.x = std::move(x);
    seq.energy = energy;
    return seq;
}

}  // namespace

P2Solution solve_p2(const P2Problem& p, const SolverTolerances& tol, const P2Options& opts) {
    const auto t_begin = std::chrono::steady_clock::now();
    const Eigen::Index n = p.h.rows();
    P2Solution sol;
    auto finish = [&] {
        sol.report.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
        return sol;
    };

    FeasibilityResult fr = feasibility_init(p.h, p.g, p.power, p.c0, CMatrix::Zero(n, n), tol);
    // The barrier needs a strictly positive slack; at C0 = 0 the zero start
    // only meets the target with equality.
    if (fr.feasible && !(fr.secrecy > p.c0))
        fr = feasibility_init(p.h, p.g, p.power, p.c0 + tol.feasibility_margin, fr.wi, tol);
    if (!fr.feasible || !(fr.secrecy > p.c0)) {
        sol.report.status = SolveStatus::infeasible;
        sol.report.note = "feasibility repair could not reach the secrecy target";
        return finish();
    }
    const Blocks start{fr.wi, CMatrix::Zero(n, n)};
    Sequence best = run_sequence(p, tol, opts.force_we_zero, start);
    int gp_iters = best.report.gp_iters;
    int decreases = best.gp_decreases;
    if (!opts.force_we_zero) {
        // The rounds only reach a stationary point. A second start from the
        // information-only optimum covers the basin where the energy beam
        // stays off and the information beam carries the harvested power.
        const Sequence info_only = run_sequence(p, tol, true, start);
        Sequence second = run_sequence(p, tol, false, info_only.x);
        gp_iters += info_only.report.gp_iters + second.report.gp_iters;
        decreases += info_only.gp_decreases + second.gp_decreases;
        if (second.energy > best.energy) {
            second.rounds.insert(second.rounds.begin(), info_only.rounds.begin(),
                                 info_only.rounds.end() - 1);
            second.report.outer_iters += info_only.report.outer_iters;
            second.report.rejected_steps += info_only.report.rejected_steps;
            second.report.note = "kept the start from the information-only optimum";
            best = std::move(second);
        }
    }
    sol.feasible = true;
    sol.report = best.report;
    sol.report.gp_iters = gp_iters;
    sol.gp_decreases = decreases;
    sol.wi = best.x[0];
    sol.we = best.x[1];
    sol.energy = best.energy;
    sol.round_objectives = best.rounds;
    sol.report.objective_trace = sol.round_objectives;
    return finish();
}

}  // namespace swipt
