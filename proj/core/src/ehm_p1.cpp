#include "swipt/ehm_p1.hpp"

#include "swipt/gp.hpp"
#include "swipt/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>

namespace swipt {

double P1Problem::energy_of(const CMatrix& w) const {
    return energy_weight() * trace_real(g.adjoint() * w * g);
}

double P1Problem::top_gain() const { return largest_eigenvalue(g * g.adjoint()); }

P1Problem make_p1_problem(const ChannelSet& cs, double power, double c0_nats) {
    if (cs.g.empty()) throw std::invalid_argument("P1 needs one energy receiver");
    P1Problem p;
    p.h = cs.h;
    p.g = cs.g[0];
    p.sigma2_e = cs.config.sigma2_e.at(0);
    p.eta = cs.config.eta.at(0);
    p.power = power;
    p.c0 = c0_nats;
    return p;
}

ClosedFormResult inner_wi_closed_form(const CMatrix& h, const CMatrix& g, const CMatrix& wi0,
                                      double lambda, double mu, double eta, double sigma2_e) {
    const Eigen::Index n = h.rows();
    const CMatrix b = log_det_gain_gradient(g, wi0);
    const CMatrix q = hermitian_part(lambda * b - sigma2_e * eta * (g * g.adjoint()) +
                                     mu * CMatrix::Identity(n, n));
    ClosedFormResult r;
    const EvdResult e = evd_hermitian(q);
    r.q_min_eig = e.eigenvalues[n - 1];
    r.q_min_vec = e.eigenvectors.col(n - 1);
    if (!(r.q_min_eig > kPdTol)) return r;
    r.q_pd = true;
    const RVector inv_sqrt = e.eigenvalues.cwiseSqrt().cwiseInverse();
    const CMatrix q_is = e.eigenvectors * inv_sqrt.asDiagonal() * e.eigenvectors.adjoint();
    Eigen::JacobiSVD<CMatrix> svd(h.adjoint() * q_is, Eigen::ComputeThinV);
    const RVector& delta = svd.singularValues();
    RVector p = RVector::Zero(delta.size());
    for (Eigen::Index i = 0; i < delta.size(); ++i)
        if (delta[i] > 0.0) p[i] = std::max(lambda - 1.0 / (delta[i] * delta[i]), 0.0);
    const CMatrix v = svd.matrixV();
    r.wi = hermitian_part(q_is * v * p.asDiagonal() * v.adjoint() * q_is);
    return r;
}

CMatrix optimal_we(const CMatrix& g, double budget) {
    if (!(budget >= 0.0)) throw std::invalid_argument("optimal_we: negative budget");
    const Eigen::Index n = g.rows();
    if (budget == 0.0) return CMatrix::Zero(n, n);
    const EvdResult e = evd_hermitian(hermitian_part(g * g.adjoint()));
    const CVector u = e.eigenvectors.col(0);
    return budget * (u * u.adjoint());
}

namespace {

struct Scales {
    double energy;  // objective units per unit of the normalized objective
    double power;   // alpha P
};

// Restores the power budget by scaling, then the surrogate secrecy target by
// mixing with the expansion point, which satisfies it.
CMatrix recover_primal(const P1Problem& p, const CMatrix& w, const CMatrix& wi0, double budget) {
    CMatrix x = w;
    const double tr = trace_real(x);
    if (tr > budget) x *= budget / tr;
    if (taylor_surrogate_s1(p.h, p.g, x, wi0) >= p.c0) return x;
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        const CMatrix m = (1.0 - mid) * x + mid * wi0;
        if (taylor_surrogate_s1(p.h, p.g, m, wi0) >= p.c0) hi = mid;
        else lo = mid;
    }
    return (1.0 - hi) * x + hi * wi0;
}

struct EllipsoidOutcome {
    EllipsoidRun run;
    bool have_primal = false;
    CMatrix w;  // best recovered primal over all iterates
    double w_energy = -1.0;
    Eigen::Vector2d dual = Eigen::Vector2d::Zero();
};

EllipsoidOutcome run_ellipsoid(const P1Problem& p, const CMatrix& wi0, const CMatrix& b,
                               double alpha, const Scales& sc, const Eigen::Vector2d& center,
                               double r2, const SolverTolerances& tol) {
    constexpr int kNoPrimalCap = 400;
    const double budget = alpha * p.power;
    EllipsoidOutcome out;
    EllipsoidState st = EllipsoidState::ball(center, r2);
    out.run.start = st;
    out.run.r = std::sqrt(r2);
    const double target_ratio = 16.0 / 27.0;
    for (int j = 1;; ++j) {
        const double lam = st.center[0] * sc.energy;
        const double mu = st.center[1] * sc.energy / sc.power;
        const ClosedFormResult cf = inner_wi_closed_form(p.h, p.g, wi0, lam, mu, p.eta, p.sigma2_e);
        Eigen::Vector2d s;
        if (!cf.q_pd) {
            // Move toward the region where v^H Q v > 0.
            const double bv = (cf.q_min_vec.adjoint() * b * cf.q_min_vec).value().real();
            s << -bv * sc.energy, -sc.energy / sc.power;
            s /= s.norm();
            ++out.run.domain_cuts;
        } else {
            const double cs = taylor_surrogate_s1(p.h, p.g, cf.wi, wi0);
            s << cs - p.c0, 1.0 - trace_real(cf.wi) / budget;
            // The final center's maximizer is sensitive to the dual error when
            // the objective is linear, so keep the best feasible recovery seen.
            const CMatrix rec = recover_primal(p, cf.wi, wi0, budget);
            const double e = p.energy_of(rec);
            if (e > out.w_energy) {
                out.w = rec;
                out.w_energy = e;
            }
            out.have_primal = true;
            out.dual = st.center;
            out.run.l_s = std::max(out.run.l_s, s.norm());
            if (s.norm() == 0.0) {
                out.run.met_stop = true;
                out.run.iterations = j;
                break;
            }
        }
        const double vol_before = st.volume_factor();
        st = ellipsoid_step(st, s);
        const double ratio = std::pow(st.volume_factor() / vol_before, 2);
        out.run.max_det_ratio_error =
            std::max(out.run.max_det_ratio_error, std::abs(ratio - target_ratio));
        out.run.iterations = j;
        if (cf.q_pd && ellipsoid_stop_metric(st, s) <= tol.eps1) {
            out.run.met_stop = true;
            break;
        }
        const int bound =
            out.have_primal ? ellipsoid_iteration_bound(out.run.r, out.run.l_s, tol.eps1) + 2
                            : kNoPrimalCap;
        out.run.bound = bound;
        if (j >= bound) break;
    }
    out.run.bound = out.have_primal
                        ? ellipsoid_iteration_bound(out.run.r, out.run.l_s, tol.eps1) + 2
                        : kNoPrimalCap;
    out.run.end_center = st.center;
    return out;
}

}  // namespace

InnerResult solve_inner(const P1Problem& p, double alpha, const CMatrix& wi0_in,
                        const SolverTolerances& tol) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("solve_inner: alpha out of (0,1]");
    const double budget = alpha * p.power;
    Scales sc{std::max(p.energy_weight() * p.top_gain() * budget, 1e-300), budget};

    InnerResult res;
    CMatrix w0 = wi0_in;
    double f0 = p.energy_of(w0);
    res.objective_trace.push_back(f0);
    Eigen::Vector2d center(tol.lambda0, tol.mu0);
    res.status = SolveStatus::iteration_limit;

    for (int m = 1; m <= tol.max_taylor_rounds; ++m) {
        res.taylor_rounds = m;
        const CMatrix b = log_det_gain_gradient(p.g, w0);
        double r2 = tol.r2;
        EllipsoidOutcome eo;
        for (int attempt = 0; attempt <= tol.max_ellipsoid_restarts; ++attempt) {
            eo = run_ellipsoid(p, w0, b, alpha, sc, center, r2, tol);
            res.runs.push_back(eo.run);
            if (eo.run.met_stop) break;
            // Bound exceeded: the optimum lies outside the initial ball.
            center = eo.run.end_center;
            r2 *= 4.0;
        }
        if (!eo.have_primal) {
            res.feasible = false;
            res.status = SolveStatus::infeasible;
            break;
        }
        center = eo.dual;
        res.lambda = eo.dual[0];
        res.mu = eo.dual[1];

        const CMatrix w1 = recover_primal(p, eo.w, w0, budget);
        const double f1 = p.energy_of(w1);
        if (f1 < f0) {
            // Inexact dual step would lower the objective; keep the current point.
            ++res.rejected_rounds;
            res.status = SolveStatus::converged;
            break;
        }
        const double dw = spectral_norm(w1 - w0);
        w0 = w1;
        f0 = f1;
        res.objective_trace.push_back(f0);
        if (dw <= tol.eps2 * std::max(1.0, budget)) {
            res.status = SolveStatus::converged;
            break;
        }
    }
    res.wi = w0;
    const double cs = taylor_surrogate_s1(p.h, p.g, w0, w0);
    res.comp_slack_rate = std::abs(res.lambda * (cs - p.c0));
    res.comp_slack_power = std::abs(res.mu * (1.0 - trace_real(w0) / budget));
    return res;
}

FeasibilityResult feasibility_init(const CMatrix& h, const CMatrix& g, double budget, double c0,
                                   const CMatrix& start, const SolverTolerances& tol) {
    const Eigen::Index n = h.rows();
    FeasibleSetSpec spec{budget, {static_cast<int>(n)}, {}};
    FeasibilityResult res;
    CMatrix w = project_feasible({start}, spec)[0];
    double cs = secrecy_capacity_p1(h, g, w);
    const double target = c0 > 0.0 ? c0 + tol.feasibility_margin : 0.0;
    if (cs >= target) {
        res.feasible = true;
        res.wi = w;
        res.secrecy = cs;
        return res;
    }
    GpOptions opts;
    opts.q1 = tol.q1_factor * std::max(budget, 1e-12);
    opts.spectral_step = tol.spectral_step;
    opts.xi1 = 1e-8;
    opts.max_iters = 500;
    opts.armijo = {tol.armijo_beta, tol.armijo_sigma, 60};
    int stalled = 0;
    for (int r = 1; stalled < tol.feasibility_rounds && r <= 10 * tol.feasibility_rounds; ++r) {
        res.rounds = r;
        const CMatrix b = log_det_gain_gradient(g, w);
        const ScalarOracle f = [&](const Blocks& x) {
            return log_det_gain(h, x[0]) - inner(b, x[0]);
        };
        const GradientOracle df = [&](const Blocks& x) {
            return Blocks{log_det_gain_gradient(h, x[0]) - b};
        };
        GpResult gp = gp_maximize(f, df, spec, {w}, opts);
        w = gp.x[0];
        const double next = secrecy_capacity_p1(h, g, w);
        const bool progressed = next > cs + 1e-10 * std::max(1.0, std::abs(cs));
        cs = std::max(cs, next);
        if (cs >= target) break;
        if (!progressed) {
            if (cs >= c0) break;  // surrogate maximum sits between c0 and the margin
            ++stalled;
            if (gp.iterations <= 1) break;
        }
    }
    res.secrecy = secrecy_capacity_p1(h, g, w);
    res.feasible = res.secrecy >= c0;
    res.wi = w;
    return res;
}

GoldenResult golden_section(const std::function<double(double)>& h, double zeta, double lo,
                            double hi) {
    if (!(lo < hi)) throw std::invalid_argument("golden_section: empty bracket");
    const double a = (std::sqrt(5.0) - 1.0) / 2.0;
    std::map<double, double> cache;
    GoldenResult res;
    res.best_value = -INFINITY;
    auto eval = [&](double x) {
        auto it = cache.find(x);
        if (it != cache.end()) return it->second;
        const double v = h(x);
        cache.emplace(x, v);
        ++res.evaluations;
        if (v > res.best_value) {
            res.best_value = v;
            res.best_alpha = x;
        }
        return v;
    };
    double b = lo, c = hi;
    double a1 = c - a * (c - b), a2 = b + a * (c - b);
    double h1 = eval(a1), h2 = eval(a2);
    while (std::abs(c - b) > zeta) {
        if (h1 > h2) {
            c = a2;
            a2 = a1;
            h2 = h1;
            a1 = c - a * (c - b);
            h1 = eval(a1);
        } else {
            b = a1;
            a1 = a2;
            h1 = h2;
            a2 = b + a * (c - b);
            h2 = eval(a2);
        }
    }
    res.lo = b;
    res.hi = c;
    res.alpha = 0.5 * (b + c);
    res.value = eval(res.alpha);
    if (res.best_alpha == 0.0 && !std::isfinite(res.best_value)) res.best_alpha = res.alpha;
    return res;
}

P1Solution solve_p1(const P1Problem& p, const SolverTolerances& tol,
                    const std::optional<CMatrix>& start) {
    const auto t_begin = std::chrono::steady_clock::now();
    const Eigen::Index n = p.h.rows();
    const CMatrix w_start = start ? *start : CMatrix::Zero(n, n);
    const double g1 = p.top_gain();

    struct Eval {
        CMatrix wi;
        InnerResult inner;
    };
    std::map<double, Eval> evals;
    P1Solution sol;

    const auto h = [&](double alpha) -> double {
        const double budget = alpha * p.power;
        FeasibilityResult fr = feasibility_init(p.h, p.g, budget, p.c0, w_start, tol);
        if (!fr.feasible) return -INFINITY;
        InnerResult ir = solve_inner(p, alpha, fr.wi, tol);
        if (!ir.feasible) return -INFINITY;
        const double value =
            p.energy_of(ir.wi) + p.energy_weight() * (1.0 - alpha) * p.power * g1;
        sol.ellipsoid_runs.insert(sol.ellipsoid_runs.end(), ir.runs.begin(), ir.runs.end());
        sol.inner_traces.push_back(ir.objective_trace);
        for (const auto& r : ir.runs) sol.report.ellipsoid_iters.push_back(r.iterations);
        sol.report.outer_iters += ir.taylor_rounds;
        sol.report.rejected_steps += ir.rejected_rounds;
        evals.emplace(alpha, Eval{ir.wi, std::move(ir)});
        return value;
    };

    // The best split sits just above the smallest budget that meets the
    // secrecy target, which shrinks as P grows, and h is only approximately
    // unimodal because the inner solves are inexact. A geometric scan finds
    // the right scale before golden section refines the bracket around it.
    std::vector<std::pair<double, double>> scan;
    for (double alpha = 1.0; alpha >= tol.alpha_scan_floor; alpha *= 0.5) {
        const double v = h(alpha);
        if (!std::isfinite(v)) break;  // feasibility is monotone in the budget
        scan.emplace_back(alpha, v);
    }
    double lo = 0.0, hi = 1.0;
    if (!scan.empty()) {
        std::size_t k = 0;
        for (std::size_t i = 1; i < scan.size(); ++i)
            if (scan[i].second > scan[k].second) k = i;
        hi = k == 0 ? 1.0 : scan[k - 1].first;
        lo = k + 1 < scan.size() ? scan[k + 1].first : 0.5 * scan[k].first;
    }
    GoldenResult gr = golden_section(h, tol.zeta * (hi - lo), lo, hi);
    for (const auto& [alpha, v] : scan)
        if (v > gr.best_value) {
            gr.best_value = v;
            gr.best_alpha = alpha;
        }
    sol.report.alpha_evals = gr.evaluations + static_cast<int>(scan.size());
    if (!std::isfinite(gr.best_value)) {
        sol.feasible = false;
        sol.report.status = SolveStatus::infeasible;
        sol.report.note = "secrecy target unattainable for every evaluated split";
    } else {
        const double alpha = gr.best_alpha;
        const Eval& e = evals.at(alpha);
        sol.feasible = true;
        sol.alpha = alpha;
        sol.wi = e.wi;
        sol.we = optimal_we(p.g, (1.0 - alpha) * p.power);
        sol.energy = gr.best_value;
        sol.report.objective_trace = e.inner.objective_trace;
        sol.report.kkt_residuals = {e.inner.comp_slack_rate, e.inner.comp_slack_power};
        sol.report.status = e.inner.status;
    }
    sol.report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    return sol;
}

}  // namespace swipt
