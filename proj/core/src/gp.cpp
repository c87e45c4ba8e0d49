#include "swipt/gp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swipt {

Blocks axpy(const Blocks& x, double a, const Blocks& y) {
    Blocks r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + a * y[i];
    return r;
}

double inner(const Blocks& a, const Blocks& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += inner(a[i], b[i]);
    return s;
}

double frobenius(const Blocks& a) { return std::sqrt(inner(a, a)); }

double find_rho(const RVector& eigs, double power) {
    if (!(power >= 0.0)) throw std::invalid_argument("find_rho: negative budget");
    std::vector<double> e(eigs.data(), eigs.data() + eigs.size());
    double positive = 0.0;
    for (double v : e) positive += std::max(v, 0.0);
    if (positive <= power) return 0.0;
    std::sort(e.begin(), e.end(), std::greater<>());
    // Largest k with e_k > (sum_{i<=k} e_i - P) / k.
    double cum = 0.0, rho = 0.0;
    for (std::size_t k = 0; k < e.size(); ++k) {
        cum += e[k];
        const double cand = (cum - power) / static_cast<double>(k + 1);
        if (e[k] > cand) rho = cand;
        else break;
    }
    return std::max(rho, 0.0);
}

Blocks project_feasible(const Blocks& x, const FeasibleSetSpec& spec) {
    std::vector<EvdResult> evd(x.size());
    std::vector<double> all;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (spec.is_frozen(i)) continue;
        evd[i] = evd_hermitian(hermitian_part(x[i]));
        for (Eigen::Index j = 0; j < evd[i].eigenvalues.size(); ++j)
            all.push_back(evd[i].eigenvalues[j]);
    }
    const double rho =
        find_rho(Eigen::Map<const RVector>(all.data(), static_cast<Eigen::Index>(all.size())),
                 spec.power);
    Blocks out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (spec.is_frozen(i)) {
            out[i] = CMatrix::Zero(x[i].rows(), x[i].cols());
            continue;
        }
        const RVector lam = (evd[i].eigenvalues.array() - rho).cwiseMax(0.0).matrix();
        out[i] = hermitian_part(evd[i].eigenvectors * lam.asDiagonal() *
                                evd[i].eigenvectors.adjoint());
    }
    return out;
}

ArmijoResult armijo_step(const ScalarOracle& g, const Blocks& x, double gx, const Blocks& grad,
                         const Blocks& d, const ArmijoParams& params) {
    ArmijoResult r;
    const double slope = inner(grad, d);
    if (frobenius(d) == 0.0) {
        r.step = 1.0;
        r.value = gx;
        r.accepted = true;
        return r;
    }
    double q2 = 1.0;
    for (int m = 0; m <= params.max_shrinks; ++m) {
        const double v = g(axpy(x, q2, d));
        if (std::isfinite(v) && v >= gx + params.sigma * q2 * slope) {
            r.step = q2;
            r.value = v;
            r.shrinks = m;
            r.accepted = true;
            return r;
        }
        q2 *= params.beta;
    }
    r.shrinks = params.max_shrinks;
    r.value = gx;
    return r;
}

namespace {

bool all_finite(const Blocks& b) {
    for (const auto& m : b)
        if (!m.allFinite()) return false;
    return true;
}

}  // namespace

GpResult gp_maximize(const ScalarOracle& g, const GradientOracle& grad,
                     const FeasibleSetSpec& spec, const Blocks& start, const GpOptions& opts) {
    GpResult res;
    res.x = start;
    res.value = g(start);
    if (!std::isfinite(res.value))
        throw std::invalid_argument("gp_maximize: objective not finite at the start point");
    res.trace.push_back(res.value);
    double q1 = opts.q1;
    bool halved = false;
    Blocks prev_x, prev_grad;
    for (int it = 0; it < opts.max_iters; ++it) {
        Blocks gr = grad(res.x);
        if (!all_finite(gr)) {
            if (halved) {
                res.stalled = true;
                break;
            }
            q1 *= 0.5;
            halved = true;
            continue;
        }
        if (opts.spectral_step && !prev_x.empty() && all_finite(gr)) {
            const Blocks sx = axpy(res.x, -1.0, prev_x);
            const Blocks sy = axpy(gr, -1.0, prev_grad);
            const double curv = -inner(sx, sy);  // > 0 for a concave objective
            if (curv > 0.0)
                q1 = std::clamp(inner(sx, sx) / curv, opts.q1 * 1e-6, opts.q1 * 1e6);
        }
        const Blocks target = project_feasible(axpy(res.x, q1, gr), spec);
        Blocks d(res.x.size());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = target[i] - res.x[i];
        const ArmijoResult step = armijo_step(g, res.x, res.value, gr, d, opts.armijo);
        ++res.iterations;
        if (!step.accepted) {
            res.stalled = true;
            break;
        }
        const double prev = res.value;
        prev_x = res.x;
        prev_grad = gr;
        res.x = axpy(res.x, step.step, d);
        res.value = step.value;
        res.trace.push_back(res.value);
        if (res.value < prev - 1e-12 * std::max(1.0, std::abs(prev))) ++res.decreases;
        const double rel = std::abs(res.value - prev) / std::max(std::abs(prev), 1e-300);
        if (rel < opts.xi1) break;
    }
    return res;
}

double barrier_value(const BarrierProblem& p, const Blocks& x, double t) {
    double b = 0.0;
    if (p.slacks) {
        for (double s : p.slacks(x)) {
            if (!(s > 0.0)) return -INFINITY;
            b += std::log(s);
        }
    }
    return p.objective(x) + b / t;
}

BarrierResult barrier_outer(const BarrierProblem& problem, const BarrierSchedule& schedule,
                            int slack_count, const FeasibleSetSpec& spec, const Blocks& start,
                            const GpOptions& opts) {
    if (slack_count > 0) {
        for (double s : problem.slacks(start))
            if (!(s > 0.0))
                throw std::invalid_argument("barrier_outer: start point is not strictly feasible");
    }
    BarrierResult res;
    res.x = start;
    double t = schedule.t0;
    for (;;) {
        const ScalarOracle g = [&, t](const Blocks& x) { return barrier_value(problem, x, t); };
        const GradientOracle dg = [&, t](const Blocks& x) {
            Blocks gr = problem.objective_gradient(x);
            if (slack_count == 0) return gr;
            std::vector<double> w = problem.slacks(x);
            for (double& s : w) s = 1.0 / (t * s);
            return axpy(gr, 1.0, problem.weighted_slack_gradient(x, w));
        };
        GpResult gp = gp_maximize(g, dg, spec, res.x, opts);
        res.x = std::move(gp.x);
        res.gp_iterations += gp.iterations;
        res.gp_decreases += gp.decreases;
        res.stalled = res.stalled || gp.stalled;
        res.final_t = t;
        const double f = problem.objective(res.x);
        res.objective_per_t.push_back(f);
        res.barrier_per_t.push_back(gp.value - f);
        if (slack_count == 0) break;
        t *= schedule.mu_t;
        ++res.t_updates;
        if (slack_count / t < schedule.xi2) break;
    }
    return res;
}

}  // namespace swipt
