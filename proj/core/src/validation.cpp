#include "swipt/validation.hpp"

#include "swipt/ehm_p1.hpp"
#include "swipt/ehm_p2.hpp"
#include "swipt/experiments.hpp"
#include "swipt/gp.hpp"
#include "swipt/metrics.hpp"
#include "swipt/oracle.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace swipt {

SolverTolerances kkt_profile(SolverTolerances t) {
    t.spectral_step = true;
    t.xi1 = 1e-12;
    t.xi3 = 1e-5;
    t.max_gp_iters = 20000;
    return t;
}

SolverTolerances reduction_profile(SolverTolerances t) {
    t.spectral_step = true;
    t.xi1 = 1e-10;
    t.xi3 = 1e-8;
    t.p2_rel_tol = 1e-8;
    t.max_p2_rounds = 500;
    t.max_p3_outer = 500;
    return t;
}

bool ValidationReport::passed() const {
    return std::all_of(gates.begin(), gates.end(), [](const GateResult& g) { return g.passed; });
}

std::string ValidationReport::to_json() const {
    nlohmann::json j;
    j["passed"] = passed();
    j["gates"] = nlohmann::json::array();
    for (const auto& g : gates)
        j["gates"].push_back({{"id", g.id},
                              {"name", g.name},
                              {"passed", g.passed},
                              {"detail", g.detail},
                              {"seconds", g.seconds}});
    return j.dump(2);
}

std::string format_gate_line(const GateResult& g) {
    char head[96];
    std::snprintf(head, sizeof head, "[%s] %2d %-22s", g.passed ? "PASS" : "FAIL", g.id,
                  g.name.c_str());
    char tail[48];
    std::snprintf(tail, sizeof tail, " (%.1f s)", g.seconds);
    return std::string(head) + " " + g.detail + tail;
}

namespace {

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

double min_eig(const CMatrix& m) { return m.size() == 0 ? 0.0 : smallest_eigenvalue(m); }

// Checks returned solutions against the original constraints.
class Audit {
public:
    void record(const std::string& where, double margin, double power_used, double budget,
                double smallest_eig) {
        std::lock_guard lock(mutex_);
        ++checked_;
        worst_margin_ = std::min(worst_margin_, margin);
        worst_excess_ = std::max(worst_excess_, power_used - budget);
        worst_eig_ = std::min(worst_eig_, smallest_eig);
        const bool ok = margin >= -1e-4 && power_used - budget <= 1e-7 &&
                        smallest_eig >= -1e-9 * std::max(1.0, budget);
        if (!ok && violations_++ == 0) first_ = where;
    }
    void p1(const std::string& where, const P1Problem& p, const P1Solution& s) {
        if (!s.feasible) return;
        record(where, secrecy_capacity_p1(p.h, p.g, s.wi) - p.c0,
               trace_real(s.wi) + trace_real(s.we), p.power, std::min(min_eig(s.wi), min_eig(s.we)));
    }
    void p2(const std::string& where, const P2Problem& p, const P2Solution& s) {
        if (!s.feasible) return;
        record(where, secrecy_rate_p2(p.h, p.g, s.wi, s.we) - p.c0,
               trace_real(s.wi) + trace_real(s.we), p.power, std::min(min_eig(s.wi), min_eig(s.we)));
    }
    void p3(const std::string& where, const P3Problem& p, const P3Solution& s) {
        if (!s.feasible) return;
        const auto slack = true_slacks(p, s.x);
        record(where, *std::min_element(slack.begin(), slack.end()), s.x.total_trace(), p.power,
               std::min({min_eig(s.x.info), min_eig(s.x.energy), min_eig(s.x.an)}));
    }
    void trial(const std::string& where, const TrialResult& t, double budget) {
        if (!t.feasible) return;
        record(where, t.secrecy_margin, t.power_used, budget, 0.0);
    }

    long long checked() const { return checked_; }
    GateResult summary() const {
        GateResult g;
        g.passed = violations_ == 0;
        g.detail = std::to_string(checked_) + " solutions; worst secrecy margin " +
                   sci(worst_margin_) + " nats, worst power excess " + sci(worst_excess_) +
                   " W, min eigenvalue " + sci(worst_eig_);
        if (violations_ > 0)
            g.detail += "; " + std::to_string(violations_) + " violations, first in " + first_;
        return g;
    }

private:
    std::mutex mutex_;
    long long checked_ = 0;
    int violations_ = 0;
    double worst_margin_ = INFINITY;
    double worst_excess_ = -INFINITY;
    double worst_eig_ = INFINITY;
    std::string first_;
};

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex m;
    auto worker = [&] {
        for (int i; (i = next.fetch_add(1)) < count;) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(m);
                if (!failure) failure = std::current_exception();
                next = count;
            }
        }
    };
    const int n = std::clamp(threads, 1, std::max(count, 1));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
}

CMatrix random_psd(CounterRng& rng, Eigen::Index n, double trace) {
    CMatrix a(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) a(i, j) = rng.complex_normal(1.0);
    CMatrix w = a * a.adjoint();
    return hermitian_part(w * (trace / trace_real(w)));
}

CMatrix random_hermitian(CounterRng& rng, Eigen::Index n, double scale) {
    CMatrix a(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) a(i, j) = rng.complex_normal(scale * scale);
    return hermitian_part(a);
}

CovarianceTriple random_triple(CounterRng& rng, Eigen::Index n, double total) {
    const double a = 0.2 + rng.uniform(), b = 0.2 + rng.uniform(), c = 0.2 + rng.uniform();
    const double s = total / (a + b + c);
    return {random_psd(rng, n, a * s), random_psd(rng, n, b * s), random_psd(rng, n, c * s)};
}

struct P1Run {
    P1Problem problem;
    P1Solution solution;
};

struct P3Run {
    P3Problem problem;
    P3Solution solution;
};

struct Context {
    const ValidationOptions& opts;
    Audit audit;
    std::vector<P1Run> p1;
    std::vector<P3Run> p3;

    int count(int full, int fast) const { return opts.fast ? fast : full; }

    ScenarioConfig scenario(int k) const {
        ScenarioConfig c = default_scenario(k);
        c.seed = opts.seed;
        return c;
    }

    // Default-tolerance P1 solves on draws 0..n-1, shared by gates 3, 4 and 6.
    const std::vector<P1Run>& p1_runs(int n) {
        const ScenarioConfig cfg = scenario(1);
        const std::size_t have = p1.size();
        if (static_cast<std::size_t>(n) <= have) return p1;
        p1.resize(static_cast<std::size_t>(n));
        parallel_for(n - static_cast<int>(have), opts.threads, [&](int i) {
            const int d = static_cast<int>(have) + i;
            P1Run& r = p1[static_cast<std::size_t>(d)];
            r.problem = make_p1_problem(draw_channels(cfg, static_cast<std::uint64_t>(d)), cfg.power,
                                        bits_to_nats(cfg.c0_bits));
            r.solution = solve_p1(r.problem, cfg.tol);
            audit.p1("p1 draw " + std::to_string(d), r.problem, r.solution);
        });
        return p1;
    }

    const std::vector<P3Run>& p3_runs(int n) {
        const ScenarioConfig cfg = scenario(3);
        const std::size_t have = p3.size();
        if (static_cast<std::size_t>(n) <= have) return p3;
        p3.resize(static_cast<std::size_t>(n));
        parallel_for(n - static_cast<int>(have), opts.threads, [&](int i) {
            const int d = static_cast<int>(have) + i;
            P3Run& r = p3[static_cast<std::size_t>(d)];
            r.problem = make_p3_problem(draw_channels(cfg, static_cast<std::uint64_t>(d)), cfg.power,
                                        bits_to_nats(cfg.r0_bits));
            r.solution = solve_p3(r.problem, cfg.tol);
            audit.p3("p3 draw " + std::to_string(d), r.problem, r.solution);
        });
        return p3;
    }
};

GateResult gate_gradients(Context& c) {
    struct Dims {
        int n_t, n_i, n_e, k;
    };
    const int per = c.count(20, 3);
    double worst = 0.0;
    int instances = 0;
    for (const Dims d : {Dims{3, 2, 2, 2}, Dims{5, 3, 3, 3}}) {
        ScenarioConfig cfg = c.scenario(d.k);
        cfg.n_t = d.n_t;
        cfg.n_i = d.n_i;
        cfg.n_e.assign(d.k, d.n_e);
        for (int i = 0; i < per; ++i) {
            P3Problem p = make_p3_problem(draw_channels(cfg, 1000 + i), cfg.power, 0.0);
            p.ir_cancels_energy = i % 2 == 1;
            CounterRng rng(c.opts.seed ^ 0x51ed2701u, static_cast<std::uint64_t>(100 * d.n_t + i));
            const CovarianceTriple x = random_triple(rng, d.n_t, cfg.power * (0.3 + 0.6 * rng.uniform()));
            const AuxMatrices t = update_t(p, random_triple(rng, d.n_t, 0.5 * cfg.power));
            const auto s = surrogate_slacks(p, x, t);
            p.r0 = *std::min_element(s.begin(), s.end()) - 0.5;  // keeps every slack >= 0.5
            const double scale = largest_eigenvalue(p.energy_matrix());
            const double barrier_t = 5.0;
            TripleGradient an = ws_gradients(p, x, t, barrier_t, scale);
            if (c.opts.gradient_hook) c.opts.gradient_hook(an);
            auto along = [&](CMatrix CovarianceTriple::*block) {
                return [&, block](const CMatrix& w) {
                    CovarianceTriple z = x;
                    z.*block = w;
                    return ws_objective(p, z, t, barrier_t, scale);
                };
            };
            const CMatrix fi = oracle::fd_gradient(along(&CovarianceTriple::info), x.info, 1e-5);
            const CMatrix fe = oracle::fd_gradient(along(&CovarianceTriple::energy), x.energy, 1e-5);
            const CMatrix fv = oracle::fd_gradient(along(&CovarianceTriple::an), x.an, 1e-5);
            const double err = std::sqrt((fi - an.info).squaredNorm() +
                                         (fe - an.energy).squaredNorm() +
                                         (fv - an.an).squaredNorm());
            const double ref = std::sqrt(an.info.squaredNorm() + an.energy.squaredNorm() +
                                         an.an.squaredNorm());
            worst = std::max(worst, err / std::max(ref, 1e-12));
            ++instances;
        }
    }
    GateResult g;
    g.passed = worst < 1e-5;
    g.detail = "max relative error " + sci(worst) + " over " + std::to_string(instances) +
               " instances (gate 1e-5)";
    return g;
}

GateResult gate_projection(Context& c) {
    const int cases = c.count(100, 20);
    double worst_ref = 0.0, worst_qp = 0.0, worst_idem = 0.0, worst_vi = -INFINITY,
           worst_budget = 0.0;
    for (int i = 0; i < cases; ++i) {
        CounterRng rng(c.opts.seed ^ 0x7a11u, static_cast<std::uint64_t>(i));
        const int n = 1 + static_cast<int>(rng.uniform() * 5.0);
        const double power = 0.5 + 9.5 * rng.uniform();
        const double spread = 0.1 + 3.0 * rng.uniform();
        const Blocks x{random_hermitian(rng, n, spread), random_hermitian(rng, n, spread),
                       random_hermitian(rng, n, spread)};
        const FeasibleSetSpec spec{power, {n, n, n}, {}};
        const Blocks proj = project_feasible(x, spec);
        auto diff = [](const Blocks& a, const std::vector<CMatrix>& b) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]).squaredNorm();
            return std::sqrt(s);
        };
        worst_ref = std::max(worst_ref, diff(proj, oracle::projection_reference(x, power)));
        worst_qp = std::max(worst_qp, diff(proj, oracle::projection_qp(x, power)));
        worst_idem = std::max(worst_idem, diff(project_feasible(proj, spec), proj));
        double tr = 0.0;
        for (const auto& b : proj) tr += trace_real(b);
        worst_budget = std::max(worst_budget, (tr - power) / power);
        for (int z = 0; z < 20; ++z) {
            const CovarianceTriple f = random_triple(rng, n, power * rng.uniform());
            const Blocks fz{f.info, f.energy, f.an};
            double vi = 0.0;
            for (std::size_t k = 0; k < 3; ++k) vi += inner(x[k] - proj[k], fz[k] - proj[k]);
            worst_vi = std::max(worst_vi, vi);
        }
    }
    GateResult g;
    g.passed = worst_ref < 1e-7 && worst_qp < 1e-7 && worst_idem < 1e-10 && worst_vi <= 1e-8 &&
               worst_budget <= 1e-8;
    g.detail = std::to_string(cases) + " tuples; vs bisection " + sci(worst_ref) + ", vs QP " +
               sci(worst_qp) + ", idempotence " + sci(worst_idem) + ", variational max " +
               sci(worst_vi) + ", budget excess " + sci(worst_budget);
    return g;
}

GateResult gate_ellipsoid(Context& c) {
    const int target = c.count(200, 20);
    int inner_solves = 0, runs = 0, over = 0, unmet = 0, draws = 0, worst_iters = 0, worst_bound = 0;
    double det_err = 0.0;
    while (inner_solves < target) {
        ++draws;
        const P1Solution& s = c.p1_runs(draws)[static_cast<std::size_t>(draws - 1)].solution;
        inner_solves += s.report.alpha_evals;
        for (const auto& r : s.ellipsoid_runs) {
            ++runs;
            if (r.iterations > r.bound) ++over;
            if (!r.met_stop) ++unmet;
            if (r.iterations > worst_iters) {
                worst_iters = r.iterations;
                worst_bound = r.bound;
            }
            det_err = std::max(det_err, r.max_det_ratio_error);
        }
        if (draws > 1000) break;
    }
    GateResult g;
    g.passed = inner_solves >= target && over == 0 && unmet == 0 && det_err <= 1e-12;
    g.detail = std::to_string(inner_solves) + " inner solves, " + std::to_string(runs) +
               " ellipsoid runs; det ratio error " + sci(det_err) + ", runs over bound " +
               std::to_string(over) + ", runs without the stop rule " + std::to_string(unmet) +
               ", longest " + std::to_string(worst_iters) + " iterations (bound " +
               std::to_string(worst_bound) + ")";
    return g;
}

int descents(const std::vector<double>& trace, double tol) {
    int n = 0;
    for (std::size_t i = 1; i < trace.size(); ++i)
        if (trace[i] < trace[i - 1] - tol) ++n;
    return n;
}

GateResult gate_monotone(Context& c) {
    const int n = c.count(50, 5);
    int p1_bad = 0, p3_bad = 0, p1_traces = 0;
    for (const auto& r : c.p1_runs(n)) {
        for (const auto& tr : r.solution.inner_traces) {
            ++p1_traces;
            if (descents(tr, 1e-9) > 0) ++p1_bad;
        }
    }
    for (const auto& r : c.p3_runs(n))
        if (descents(r.solution.outer_energies, 1e-9) > 0) ++p3_bad;
    GateResult g;
    g.passed = p1_bad == 0 && p3_bad == 0;
    g.detail = "P1: " + std::to_string(p1_traces) + " Taylor-loop traces over " +
               std::to_string(n) + " runs, " + std::to_string(p1_bad) + " with a descent; P3: " +
               std::to_string(n) + " runs, " + std::to_string(p3_bad) + " with a descent";
    return g;
}

GateResult gate_structure(Context& c) {
    const int n = c.count(50, 5);
    double worst_rank = 0.0, worst_energy = 0.0;
    int checked = 0;
    for (const auto& r : c.p1_runs(n)) {
        const P1Solution& s = r.solution;
        if (!s.feasible) continue;
        ++checked;
        const RVector e = evd_hermitian(s.we).eigenvalues;
        if (e.size() > 1) worst_rank = std::max(worst_rank, e[1] / std::max(e[0], 1e-300));
        const double expect =
            r.problem.energy_weight() * (1.0 - s.alpha) * r.problem.power * r.problem.top_gain();
        worst_energy = std::max(worst_energy, std::abs(r.problem.energy_of(s.we) - expect) / expect);
    }
    GateResult g;
    g.passed = checked > 0 && worst_rank < 1e-8 && worst_energy <= 1e-6;
    g.detail = std::to_string(checked) + " solutions; max second/first eigenvalue " +
               sci(worst_rank) + ", max energy mismatch " + sci(worst_energy) + " relative";
    return g;
}

GateResult gate_kkt(Context& c) {
    const int n = c.count(50, 3);
    ScenarioConfig cfg = c.scenario(3);
    const SolverTolerances tol = kkt_profile(cfg.tol);
    const double gate = 1e-3 * std::max({1.0, cfg.power, cfg.r0_bits});
    std::vector<KktResidual> res(static_cast<std::size_t>(n));
    std::vector<char> feasible(static_cast<std::size_t>(n), 0);
    parallel_for(n, c.opts.threads, [&](int i) {
        const P3Problem p = make_p3_problem(draw_channels(cfg, static_cast<std::uint64_t>(i)),
                                            cfg.power, bits_to_nats(cfg.r0_bits));
        const P3Solution s = solve_p3(p, tol);
        c.audit.p3("kkt draw " + std::to_string(i), p, s);
        feasible[static_cast<std::size_t>(i)] = s.feasible;
        res[static_cast<std::size_t>(i)] = s.kkt;
    });
    KktResidual worst;
    int fails = 0, infeasible = 0;
    for (int i = 0; i < n; ++i) {
        const auto& k = res[static_cast<std::size_t>(i)];
        if (!feasible[static_cast<std::size_t>(i)]) {
            ++infeasible;
            continue;
        }
        worst.stationarity = std::max(worst.stationarity, k.stationarity);
        worst.comp_slack_rate = std::max(worst.comp_slack_rate, k.comp_slack_rate);
        worst.comp_slack_power = std::max(worst.comp_slack_power, k.comp_slack_power);
        worst.dual_feas = std::max(worst.dual_feas, k.dual_feas);
        if (!(k.max() < gate)) ++fails;
    }
    GateResult g;
    g.passed = fails == 0 && infeasible == 0;
    g.detail = std::to_string(n) + " draws; worst stationarity " + sci(worst.stationarity) +
               ", rate slackness " + sci(worst.comp_slack_rate) + ", power slackness " +
               sci(worst.comp_slack_power) + ", dual feasibility " + sci(worst.dual_feas) +
               " (gate " + sci(gate) + "); " + std::to_string(fails) + " over gate, " +
               std::to_string(infeasible) + " infeasible";
    return g;
}

GateResult gate_reduction(Context& c) {
    const int n = c.count(20, 3);
    const ScenarioConfig cfg = c.scenario(1);
    const SolverTolerances tol = reduction_profile(cfg.tol);
    std::vector<double> rel(static_cast<std::size_t>(n), INFINITY);
    parallel_for(n, c.opts.threads, [&](int i) {
        const ChannelSet cs = draw_channels(cfg, static_cast<std::uint64_t>(i));
        const P2Problem p2 = make_p1_problem(cs, cfg.power, bits_to_nats(cfg.c0_bits));
        P3Problem p3 = make_p3_problem(cs, cfg.power, bits_to_nats(cfg.c0_bits));
        p3.force_v_zero = true;
        const P2Solution a = solve_p2(p2, tol);
        const P3Solution b = solve_p3(p3, tol);
        c.audit.p2("reduction p2 draw " + std::to_string(i), p2, a);
        c.audit.p3("reduction p3 draw " + std::to_string(i), p3, b);
        if (a.feasible && b.feasible)
            rel[static_cast<std::size_t>(i)] = std::abs(a.energy - b.energy) / a.energy;
        else if (!a.feasible && !b.feasible)
            rel[static_cast<std::size_t>(i)] = 0.0;
    });
    const double worst = *std::max_element(rel.begin(), rel.end());
    GateResult g;
    g.passed = worst <= 1e-3;
    g.detail = std::to_string(n) + " draws; max relative gap " + sci(worst) + " (gate 1e-3)";
    return g;
}

GateResult gate_tiny(Context& c) {
    const int n = c.count(20, 5);
    ScenarioConfig cfg = c.scenario(1);
    cfg.n_t = 2;
    cfg.n_i = 1;
    cfg.n_e = {1};
    cfg.c0_bits = 1.0;
    oracle::GridSpec spec;
    spec.power = cfg.power;
    std::vector<double> r1(static_cast<std::size_t>(n)), r2(static_cast<std::size_t>(n));
    std::vector<char> verdict_ok(static_cast<std::size_t>(n), 1);
    parallel_for(n, c.opts.threads, [&](int i) {
        const P1Problem p = make_p1_problem(draw_channels(cfg, static_cast<std::uint64_t>(i)),
                                            cfg.power, bits_to_nats(cfg.c0_bits));
        const auto g1 = oracle::grid_search_tiny(p.h, p.g, p.sigma2_e, p.eta, p.c0, spec,
                                                 oracle::TinyProblem::p1);
        const auto g2 = oracle::grid_search_tiny(p.h, p.g, p.sigma2_e, p.eta, p.c0, spec,
                                                 oracle::TinyProblem::p2);
        const P1Solution s1 = solve_p1(p, cfg.tol);
        const P2Solution s2 = solve_p2(p, cfg.tol);
        c.audit.p1("tiny p1 draw " + std::to_string(i), p, s1);
        c.audit.p2("tiny p2 draw " + std::to_string(i), p, s2);
        const auto k = static_cast<std::size_t>(i);
        if ((g1.any_feasible && !s1.feasible) || (g2.any_feasible && !s2.feasible)) verdict_ok[k] = 0;
        r1[k] = g1.any_feasible ? s1.energy / g1.best_energy : 1.0;
        r2[k] = g2.any_feasible ? s2.energy / g2.best_energy : 1.0;
    });
    const double w1 = *std::min_element(r1.begin(), r1.end());
    const double w2 = *std::min_element(r2.begin(), r2.end());
    const long bad_verdicts = std::count(verdict_ok.begin(), verdict_ok.end(), 0);
    GateResult g;
    g.passed = w1 >= 0.98 && w2 >= 0.98 && bad_verdicts == 0;
    g.detail = std::to_string(n) + " draws; worst solver/grid ratio P1 " + sci(w1) + ", P2 " +
               sci(w2) + " (gate 0.98); " + std::to_string(bad_verdicts) +
               " feasibility disagreements";
    return g;
}

// Means over the trials feasible at every axis value of every listed sweep.
std::vector<std::vector<double>> common_means(const std::vector<const SweepResult*>& sweeps,
                                              int* common_count) {
    const std::size_t trials = sweeps.front()->trials.front().size();
    std::vector<char> keep(trials, 1);
    for (const SweepResult* s : sweeps)
        for (const auto& row : s->trials)
            for (std::size_t t = 0; t < trials; ++t)
                if (!row[t].feasible) keep[t] = 0;
    *common_count = static_cast<int>(std::count(keep.begin(), keep.end(), 1));
    std::vector<std::vector<double>> out;
    for (const SweepResult* s : sweeps) {
        std::vector<double> means;
        for (const auto& row : s->trials) {
            double sum = 0.0;
            for (std::size_t t = 0; t < trials; ++t)
                if (keep[t]) sum += row[t].energy;
            means.push_back(*common_count > 0 ? sum / *common_count : std::nan(""));
        }
        out.push_back(std::move(means));
    }
    return out;
}

GateResult gate_trends(Context& c) {
    const int trials = c.count(50, 5);
    const std::vector<double> powers{3, 6, 9, 12, 15, 18};
    const std::vector<double> targets{1, 2, 3, 4, 5};
    auto sweep = [&](SolverKind solver, SweepAxis axis, int k, bool an) {
        SweepSpec s;
        s.solver = solver;
        s.axis = axis;
        s.axis_unit = axis == SweepAxis::power ? "dBW" : "bits";
        s.values = axis == SweepAxis::power ? powers : targets;
        s.trials = trials;
        s.flags.an_enabled = an;
        const ScenarioConfig cfg = c.scenario(k);
        SweepResult r = run_sweep(cfg, s, c.opts.threads);
        for (std::size_t v = 0; v < r.trials.size(); ++v) {
            const double budget = at_axis_value(cfg, s, s.values[v]).power;
            for (const auto& t : r.trials[v])
                c.audit.trial(std::string(to_string(solver)) + " sweep", t, budget);
        }
        return r;
    };
    const SweepResult p1_pow = sweep(SolverKind::p1, SweepAxis::power, 1, true);
    const SweepResult p2_pow = sweep(SolverKind::p2, SweepAxis::power, 1, true);
    const SweepResult p1_sec = sweep(SolverKind::p1, SweepAxis::secrecy_target, 1, true);
    const SweepResult p2_sec = sweep(SolverKind::p2, SweepAxis::secrecy_target, 1, true);
    const SweepResult k3_on = sweep(SolverKind::p3, SweepAxis::power, 3, true);
    const SweepResult k3_off = sweep(SolverKind::p3, SweepAxis::power, 3, false);
    const SweepResult k1_on = sweep(SolverKind::p3, SweepAxis::power, 1, true);
    const SweepResult k1_off = sweep(SolverKind::p3, SweepAxis::power, 1, false);

    std::vector<std::string> failures;
    std::ostringstream info;
    int n = 0;
    // (a) shapes
    for (const auto& [name, res, increasing] :
         {std::tuple{"P1 power", &p1_pow, true}, std::tuple{"P2 power", &p2_pow, true},
          std::tuple{"P1 secrecy", &p1_sec, false}, std::tuple{"P2 secrecy", &p2_sec, false}}) {
        const auto m = common_means({res}, &n).front();
        bool ok = n > 0;
        for (std::size_t i = 1; i < m.size(); ++i)
            ok = ok && (increasing ? m[i] > m[i - 1] : m[i] <= m[i - 1] * (1.0 + 1e-9));
        if (!ok) failures.push_back(std::string("a:") + name);
        info << name << " n=" << n << "; ";
    }
    // (b) cancellation helps at every power
    {
        const auto m = common_means({&p1_pow, &p2_pow}, &n);
        bool ok = n > 0;
        for (std::size_t i = 0; i < powers.size(); ++i) ok = ok && m[0][i] >= m[1][i];
        if (!ok) failures.push_back("b");
        info << "P1>=P2 n=" << n << "; ";
    }
    // (c) AN with three ERs: never worse, relative gain largest at the lowest power
    {
        const auto m = common_means({&k3_on, &k3_off}, &n);
        bool ok = n > 0;
        std::vector<double> gain;
        for (std::size_t i = 0; i < powers.size(); ++i) {
            ok = ok && m[0][i] >= m[1][i];
            gain.push_back((m[0][i] - m[1][i]) / m[1][i]);
        }
        ok = ok && gain.front() >= *std::max_element(gain.begin(), gain.end());
        if (!ok) failures.push_back("c");
        info << "K=3 AN gain " << sci(gain.front()) << " at " << powers.front() << " dBW to "
             << sci(gain.back()) << " at " << powers.back() << " dBW, n=" << n << "; ";
    }
    // (d) AN with one ER: within 2%
    {
        const auto m = common_means({&k1_on, &k1_off}, &n);
        double worst = 0.0;
        for (std::size_t i = 0; i < powers.size(); ++i)
            worst = std::max(worst, std::abs(m[0][i] - m[1][i]) / m[1][i]);
        if (!(n > 0 && worst <= 0.02)) failures.push_back("d");
        info << "K=1 AN max gap " << sci(worst) << ", n=" << n;
    }
    GateResult g;
    g.passed = failures.empty();
    std::string failed;
    for (const auto& f : failures) failed += (failed.empty() ? "" : ",") + f;
    g.detail = std::to_string(trials) + " trials; " + info.str() +
               (failed.empty() ? "" : "; failed " + failed);
    return g;
}

GateResult gate_two_start(Context& c) {
    const int n = c.count(10, 3);
    const ScenarioConfig cfg = c.scenario(1);
    std::vector<double> rel(static_cast<std::size_t>(n), INFINITY);
    parallel_for(n, c.opts.threads, [&](int i) {
        const P1Problem p = make_p1_problem(draw_channels(cfg, static_cast<std::uint64_t>(i)),
                                            cfg.power, bits_to_nats(cfg.c0_bits));
        CounterRng rng(c.opts.seed ^ 0x2a2au, static_cast<std::uint64_t>(i));
        const CMatrix other = random_psd(rng, p.h.rows(), p.power);
        const P1Solution a = solve_p1(p, cfg.tol);
        const P1Solution b = solve_p1(p, cfg.tol, other);
        c.audit.p1("two-start a draw " + std::to_string(i), p, a);
        c.audit.p1("two-start b draw " + std::to_string(i), p, b);
        if (a.feasible && b.feasible)
            rel[static_cast<std::size_t>(i)] =
                std::abs(a.energy - b.energy) / std::max(a.energy, b.energy);
    });
    const double worst = *std::max_element(rel.begin(), rel.end());
    GateResult g;
    g.passed = worst <= 1e-3;
    g.detail = std::to_string(n) + " draws; max relative gap " + sci(worst) + " (gate 1e-3)";
    return g;
}

GateResult gate_feasibility(Context& c) {
    if (c.audit.checked() == 0) {
        c.p1_runs(c.count(5, 2));
        c.p3_runs(c.count(5, 2));
    }
    return c.audit.summary();
}

}  // namespace

ValidationReport run_validation(const ValidationOptions& opts) {
    Context ctx{opts, {}, {}, {}};
    using Gate = GateResult (*)(Context&);
    const std::vector<std::pair<const char*, Gate>> gates{
        {"gradient_fidelity", gate_gradients},   {"projection", gate_projection},
        {"ellipsoid_contract", gate_ellipsoid},  {"monotone_ascent", gate_monotone},
        {"true_feasibility", gate_feasibility},  {"energy_beam_structure", gate_structure},
        {"kkt_gate", gate_kkt},                  {"reduction", gate_reduction},
        {"tiny_grid", gate_tiny},                {"trends", gate_trends},
        {"two_start", gate_two_start}};
    auto selected = [&](int id) {
        return opts.only.empty() ||
               std::find(opts.only.begin(), opts.only.end(), id) != opts.only.end();
    };
    ValidationReport report;
    auto run = [&](int id) {
        const auto t0 = std::chrono::steady_clock::now();
        GateResult g;
        try {
            g = gates[static_cast<std::size_t>(id - 1)].second(ctx);
        } catch (const std::exception& e) {
            g.passed = false;
            g.detail = std::string("exception: ") + e.what();
        }
        g.id = id;
        g.name = gates[static_cast<std::size_t>(id - 1)].first;
        g.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (opts.log) *opts.log << format_gate_line(g) << std::endl;
        report.gates.push_back(std::move(g));
    };
    constexpr int kFeasibilityGate = 5;
    for (int id = 1; id <= static_cast<int>(gates.size()); ++id)
        if (id != kFeasibilityGate && selected(id)) run(id);
    if (selected(kFeasibilityGate)) run(kFeasibilityGate);
    std::sort(report.gates.begin(), report.gates.end(),
              [](const GateResult& a, const GateResult& b) { return a.id < b.id; });
    return report;
}

}  // namespace swipt
