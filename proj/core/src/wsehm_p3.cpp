#include "swipt/wsehm_p3.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace swipt {

CMatrix P3Problem::energy_matrix() const {
    const Eigen::Index n = h.rows();
    CMatrix m = CMatrix::Zero(n, n);
    for (int k = 0; k < this->k(); ++k) m += weight(k) * (g[k] * g[k].adjoint());
    return hermitian_part(m);
}

double P3Problem::energy_of(const CovarianceTriple& x) const {
    return harvested_energy(g, x, mu, eta, sigma2_e);
}

P3Problem make_p3_problem(const ChannelSet& cs, double power, double r0_nats) {
    P3Problem p;
    p.h = cs.h;
    p.g = cs.g;
    p.sigma2_e = cs.config.sigma2_e;
    p.eta = cs.config.eta;
    p.mu = cs.config.mu;
    p.power = power;
    p.r0 = r0_nats;
    return p;
}

namespace {

// Interference seen by the IR.
CMatrix ir_interference(const P3Problem& p, const CovarianceTriple& x) {
    return p.ir_cancels_energy ? x.an : CMatrix(x.energy + x.an);
}

CMatrix gram(const CMatrix& a, const CMatrix& w) { return a.adjoint() * w * a; }

double log_det_pd(const CMatrix& a) { return log_det_i_plus(a - CMatrix::Identity(a.rows(), a.cols())); }

CovarianceTriple from_blocks(const Blocks& b) { return {b[0], b[1], b[2]}; }
Blocks to_blocks(const CovarianceTriple& x) { return {x.info, x.energy, x.an}; }

// Pieces shared by the gradients: Omega, H T0 H^H, G_k T_k G_k^H, Psi_k.
struct GradientTerms {
    CMatrix omega;
    CMatrix ht0h;
    std::vector<CMatrix> gtg;
    std::vector<CMatrix> psi;
};

GradientTerms gradient_terms(const P3Problem& p, const CovarianceTriple& x, const AuxMatrices& t) {
    GradientTerms gt;
    const CMatrix j = ir_interference(p, x);
    gt.omega = log_det_gain_gradient(p.h, x.info + j);
    gt.ht0h = hermitian_part(p.h * t.t0 * p.h.adjoint());
    for (int k = 0; k < p.k(); ++k) {
        gt.gtg.push_back(hermitian_part(p.g[k] * t.tk[k] * p.g[k].adjoint()));
        gt.psi.push_back(log_det_gain_gradient(p.g[k], x.an));
    }
    return gt;
}

// sum_k w_k grad x_k
TripleGradient weighted_slack_gradient(const P3Problem& p, const GradientTerms& gt,
                                       const std::vector<double>& w) {
    const Eigen::Index n = p.h.rows();
    TripleGradient r{CMatrix::Zero(n, n), CMatrix::Zero(n, n), CMatrix::Zero(n, n)};
    double wsum = 0.0;
    for (double v : w) wsum += v;
    const CMatrix interference_part = gt.omega - gt.ht0h;
    for (int k = 0; k < p.k(); ++k) {
        r.info += w[k] * (gt.omega - gt.gtg[k]);
        r.an += w[k] * (gt.psi[k] - gt.gtg[k]);
    }
    r.an += wsum * interference_part;
    if (!p.ir_cancels_energy) r.energy = wsum * interference_part;
    return r;
}

}  // namespace

AuxMatrices update_t(const P3Problem& p, const CovarianceTriple& x) {
    AuxMatrices t;
    t.t0 = inv_i_plus(gram(p.h, ir_interference(p, x)));
    for (int k = 0; k < p.k(); ++k) t.tk.push_back(inv_i_plus(gram(p.g[k], x.info + x.an)));
    return t;
}

std::vector<double> surrogate_slacks(const P3Problem& p, const CovarianceTriple& x,
                                     const AuxMatrices& t) {
    const CMatrix j = ir_interference(p, x);
    const Eigen::Index ni = p.h.cols();
    const CMatrix ei = CMatrix::Identity(ni, ni) + gram(p.h, j);
    const double theta_i = log_det_pd(t.t0) - trace_real(t.t0 * ei) + static_cast<double>(ni) +
                           log_det_gain(p.h, x.info + j);
    std::vector<double> s(p.k());
    for (int k = 0; k < p.k(); ++k) {
        const Eigen::Index ne = p.g[k].cols();
        const CMatrix ee = CMatrix::Identity(ne, ne) + gram(p.g[k], x.info + x.an);
        const double theta_e = -log_det_gain(p.g[k], x.an) - log_det_pd(t.tk[k]) +
                               trace_real(t.tk[k] * ee) - static_cast<double>(ne);
        s[k] = theta_i - theta_e - p.r0;
    }
    return s;
}

std::vector<double> true_slacks(const P3Problem& p, const CovarianceTriple& x) {
    const double ci = ir_rate(p.h, x, p.ir_cancels_energy);
    std::vector<double> s(p.k());
    for (int k = 0; k < p.k(); ++k) s[k] = ci - er_rate(p.g[k], x) - p.r0;
    return s;
}

double ws_objective(const P3Problem& p, const CovarianceTriple& x, const AuxMatrices& t,
                    double barrier_t, double energy_scale) {
    double b = 0.0;
    for (double s : surrogate_slacks(p, x, t)) {
        if (!(s > 0.0)) return -INFINITY;
        b += std::log(s);
    }
    return p.energy_of(x) / energy_scale + b / barrier_t;
}

TripleGradient ws_gradients(const P3Problem& p, const CovarianceTriple& x, const AuxMatrices& t,
                            double barrier_t, double energy_scale) {
    std::vector<double> w = surrogate_slacks(p, x, t);
    for (double& s : w) {
        if (!(s > 0.0)) throw NumericalError("ws_gradients: barrier slack is not positive", s);
        s = 1.0 / (barrier_t * s);
    }
    TripleGradient r = weighted_slack_gradient(p, gradient_terms(p, x, t), w);
    const CMatrix m = p.energy_matrix() / energy_scale;
    r.info += m;
    r.energy += m;
    r.an += m;
    return r;
}

KktResidual kkt_residual(const P3Problem& p, const CovarianceTriple& x, const AuxMatrices& t,
                         double barrier_t) {
    const std::vector<double> slack = surrogate_slacks(p, x, t);
    std::vector<double> lam(slack.size());
    KktResidual res;
    for (std::size_t k = 0; k < slack.size(); ++k) {
        lam[k] = 1.0 / (barrier_t * slack[k]);
        res.comp_slack_rate = std::max(res.comp_slack_rate, std::abs(lam[k] * slack[k]));
        res.dual_feas = std::max(res.dual_feas, -lam[k]);
    }
    const TripleGradient wg = weighted_slack_gradient(p, gradient_terms(p, x, t), lam);
    const CMatrix m = p.energy_matrix();
    const std::vector<CMatrix> blocks{x.info, x.energy, x.an};
    const std::vector<CMatrix> stat{m + wg.info, m + wg.energy, m + wg.an};
    const std::vector<bool> frozen{false, p.force_we_zero, p.force_v_zero};
    const Eigen::Index n = p.h.rows();
    const double tiny = 1e-7 * std::max(1.0, p.power);

    // Range / null-space split of each active block.
    std::vector<CMatrix> range(3), null(3);
    double num = 0.0;
    Eigen::Index rank_total = 0;
    for (int b = 0; b < 3; ++b) {
        if (frozen[b]) continue;
        const EvdResult e = evd_psd_clipped(blocks[b]);
        Eigen::Index r = 0;
        while (r < n && e.eigenvalues[r] > tiny) ++r;
        range[b] = e.eigenvectors.leftCols(r);
        null[b] = e.eigenvectors.rightCols(n - r);
        num += trace_real(range[b].adjoint() * stat[b] * range[b]);
        rank_total += r;
    }
    double upsilon = 0.0;
    if (rank_total > 0) {
        upsilon = num / static_cast<double>(rank_total);
    } else {
        for (int b = 0; b < 3; ++b)
            if (!frozen[b]) upsilon = std::max(upsilon, largest_eigenvalue(stat[b]));
    }
    res.dual_feas = std::max(res.dual_feas, -upsilon);
    upsilon = std::max(upsilon, 0.0);
    res.comp_slack_power = std::abs(upsilon * (x.total_trace() - p.power));

    for (int b = 0; b < 3; ++b) {
        if (frozen[b]) continue;
        // Phi lives on the null space of the block and must be PSD.
        CMatrix phi = CMatrix::Zero(n, n);
        if (null[b].cols() > 0) {
            const CMatrix d = null[b].adjoint() * (upsilon * CMatrix::Identity(n, n) - stat[b]) * null[b];
            const EvdResult e = evd_psd_clipped(d);
            const CMatrix dp = e.eigenvectors * e.eigenvalues.asDiagonal() * e.eigenvectors.adjoint();
            phi = null[b] * dp * null[b].adjoint();
        }
        const CMatrix r = stat[b] - upsilon * CMatrix::Identity(n, n) + phi;
        res.stationarity = std::max(res.stationarity, r.norm());
    }
    return res;
}

bool repair_p3_start(const P3Problem& p, CovarianceTriple& x, const SolverTolerances& tol) {
    const Eigen::Index n = p.h.rows();
    const double target = tol.feasibility_margin;
    auto min_true = [&](const CovarianceTriple& y) {
        const auto s = true_slacks(p, y);
        return *std::min_element(s.begin(), s.end());
    };
    double best = min_true(x);
    if (best >= target) return true;
    FeasibleSetSpec spec{p.power, {int(n), int(n), int(n)}, {false, p.force_we_zero, p.force_v_zero}};
    GpOptions opts;
    opts.q1 = tol.q1_factor * p.power;
    opts.spectral_step = tol.spectral_step;
    opts.xi1 = 1e-8;
    opts.max_iters = 500;
    opts.armijo = {tol.armijo_beta, tol.armijo_sigma, 60};
    constexpr double beta = 20.0;  // soft-min sharpness, per nat
    int stalled = 0;
    Blocks xb = to_blocks(x);
    for (int r = 0; r < 10 * tol.feasibility_rounds && stalled < 3; ++r) {
        const AuxMatrices t = update_t(p, from_blocks(xb));
        const ScalarOracle f = [&](const Blocks& y) {
            const auto s = surrogate_slacks(p, from_blocks(y), t);
            const double lo = *std::min_element(s.begin(), s.end());
            double acc = 0.0;
            for (double v : s) acc += std::exp(-beta * (v - lo));
            return lo - std::log(acc) / beta;
        };
        const GradientOracle df = [&](const Blocks& y) {
            const CovarianceTriple yt = from_blocks(y);
            const auto s = surrogate_slacks(p, yt, t);
            const double lo = *std::min_element(s.begin(), s.end());
            std::vector<double> w(s.size());
            double acc = 0.0;
            for (std::size_t k = 0; k < s.size(); ++k) acc += (w[k] = std::exp(-beta * (s[k] - lo)));
            for (double& v : w) v /= acc;
            const TripleGradient g = weighted_slack_gradient(p, gradient_terms(p, yt, t), w);
            return Blocks{g.info, g.energy, g.an};
        };
        GpResult gp = gp_maximize(f, df, spec, xb, opts);
        xb = gp.x;
        const double now = min_true(from_blocks(xb));
        if (now >= target) {
            x = from_blocks(xb);
            return true;
        }
        if (now <= best + 1e-9) ++stalled;
        else stalled = 0;
        best = std::max(best, now);
    }
    x = from_blocks(xb);
    return false;
}

P3Solution solve_p3(const P3Problem& p, const SolverTolerances& tol,
                    const std::optional<CovarianceTriple>& start) {
    const auto t_begin = std::chrono::steady_clock::now();
    const Eigen::Index n = p.h.rows();
    P3Solution sol;
    auto finish = [&] {
        sol.report.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
        return sol;
    };

    const double init = p.power / (3.0 * static_cast<double>(n));
    CovarianceTriple x = CovarianceTriple::zero(n);
    x.info = init * CMatrix::Identity(n, n);
    if (!p.force_we_zero) x.energy = init * CMatrix::Identity(n, n);
    if (!p.force_v_zero) x.an = init * CMatrix::Identity(n, n);
    if (start) {
        x = *start;
        if (p.force_we_zero) x.energy.setZero();
        if (p.force_v_zero) x.an.setZero();
    }
    if (!repair_p3_start(p, x, tol)) {
        sol.report.status = SolveStatus::infeasible;
        sol.report.note = "feasibility repair could not reach the secrecy target";
        return finish();
    }

    // Energy measured in units of the best weighted single-beam gain.
    const CMatrix em = p.energy_matrix();
    const double scale = std::max(largest_eigenvalue(em), 1e-300);
    const CMatrix em_n = em / scale;
    FeasibleSetSpec spec{p.power, {int(n), int(n), int(n)}, {false, p.force_we_zero, p.force_v_zero}};
    BarrierSchedule sched{tol.t0, tol.mu_t, tol.xi2};
    GpOptions gpo;
    gpo.q1 = tol.q1_factor * p.power;
    gpo.spectral_step = tol.spectral_step;
    gpo.xi1 = tol.xi1;
    gpo.max_iters = tol.max_gp_iters;
    gpo.armijo = {tol.armijo_beta, tol.armijo_sigma, 60};

    double energy = p.energy_of(x);
    sol.outer_energies.push_back(energy);
    AuxMatrices aux = update_t(p, x);
    double last_t = tol.t0;
    sol.report.status = SolveStatus::iteration_limit;

    for (int it = 1; it <= tol.max_p3_outer; ++it) {
        sol.report.outer_iters = it;
        const AuxMatrices t = update_t(p, x);
        BarrierProblem bp;
        bp.objective = [&](const Blocks& y) {
            return trace_real(em_n * (y[0] + y[1] + y[2]));
        };
        bp.objective_gradient = [&](const Blocks&) { return Blocks{em_n, em_n, em_n}; };
        bp.slacks = [&](const Blocks& y) { return surrogate_slacks(p, from_blocks(y), t); };
        bp.weighted_slack_gradient = [&](const Blocks& y, const std::vector<double>& w) {
            const CovarianceTriple yt = from_blocks(y);
            const TripleGradient g = weighted_slack_gradient(p, gradient_terms(p, yt, t), w);
            return Blocks{g.info, g.energy, g.an};
        };
        BarrierResult br = barrier_outer(bp, sched, p.k(), spec, to_blocks(x), gpo);
        sol.report.gp_iters += br.gp_iterations;
        sol.report.barrier_rounds += br.t_updates;
        sol.gp_decreases += br.gp_decreases;
        const CovarianceTriple next = from_blocks(br.x);
        const double e_next = p.energy_of(next);
        if (e_next < energy) {
            ++sol.report.rejected_steps;
            sol.report.status = SolveStatus::converged;
            break;
        }
        const double change = (e_next - energy) / scale;
        x = next;
        energy = e_next;
        aux = t;
        last_t = br.final_t;
        sol.outer_energies.push_back(energy);
        if (change < tol.xi3) {
            sol.report.status = SolveStatus::converged;
            break;
        }
    }
    sol.feasible = true;
    sol.x = x;
    sol.energy = energy;
    sol.aux = aux;
    sol.barrier_t = last_t / scale;
    sol.kkt = kkt_residual(p, x, aux, sol.barrier_t);
    sol.report.kkt = sol.kkt;
    sol.report.kkt_residuals = {sol.kkt.stationarity, sol.kkt.comp_slack_rate,
                                sol.kkt.comp_slack_power, sol.kkt.dual_feas};
    sol.report.objective_trace = sol.outer_energies;
    return finish();
}

}  // namespace swipt
