#pragma once

#include "swipt/linalg.hpp"

#include <functional>
#include <vector>

namespace swipt {

using Blocks = std::vector<CMatrix>;

// {Tr(sum of blocks) <= power, every block PSD}. Frozen blocks are held at 0.
struct FeasibleSetSpec {
    double power = 1.0;
    std::vector<int> block_dims;
    std::vector<bool> frozen;

    bool is_frozen(std::size_t i) const { return i < frozen.size() && frozen[i]; }
};

struct BarrierSchedule {
    double t0 = 1.0;
    double mu_t = 3.0;
    double xi2 = 1e-6;
};

struct ArmijoParams {
    double beta = 0.5;
    double sigma = 1e-4;
    int max_shrinks = 60;
};

double find_rho(const RVector& eigs, double power);
Blocks project_feasible(const Blocks& x, const FeasibleSetSpec& spec);

struct ArmijoResult {
    double step = 0.0;
    double value = 0.0;
    int shrinks = 0;
    bool accepted = false;
};

using ScalarOracle = std::function<double(const Blocks&)>;
using GradientOracle = std::function<Blocks(const Blocks&)>;

// Backtracks q2 = beta^m until g(x + q2 d) >= g(x) + sigma q2 <grad, d>.
ArmijoResult armijo_step(const ScalarOracle& g, const Blocks& x, double gx, const Blocks& grad,
                         const Blocks& d, const ArmijoParams& params);

struct GpOptions {
    double q1 = 0.1;
    // Barzilai-Borwein scaling of q1 from the last accepted step, clamped to
    // [q1 * 1e-6, q1 * 1e6]. Off by default: the plain method keeps q1 fixed.
    bool spectral_step = false;
    double xi1 = 1e-3;
    int max_iters = 2000;
    ArmijoParams armijo;
};

struct GpResult {
    Blocks x;
    double value = 0.0;
    int iterations = 0;
    std::vector<double> trace;
    bool stalled = false;
    int decreases = 0;  // accepted steps that lowered g beyond round-off (audit)
};

GpResult gp_maximize(const ScalarOracle& g, const GradientOracle& grad,
                     const FeasibleSetSpec& spec, const Blocks& start, const GpOptions& opts);

// Maximizes objective(x) + (1/t) sum_k ln slack_k(x) for an increasing t.
struct BarrierProblem {
    ScalarOracle objective;
    GradientOracle objective_gradient;
    std::function<std::vector<double>(const Blocks&)> slacks;
    // sum_k w_k grad slack_k(x)
    std::function<Blocks(const Blocks&, const std::vector<double>&)> weighted_slack_gradient;
};

struct BarrierResult {
    Blocks x;
    double final_t = 0.0;   // t of the last GP solve
    int t_updates = 0;
    int gp_iterations = 0;
    int gp_decreases = 0;
    std::vector<double> objective_per_t;  // objective (without barrier) after each t
    std::vector<double> barrier_per_t;    // (1/t) sum ln slack after each t
    bool stalled = false;
};

double barrier_value(const BarrierProblem& p, const Blocks& x, double t);

BarrierResult barrier_outer(const BarrierProblem& problem, const BarrierSchedule& schedule,
                            int slack_count, const FeasibleSetSpec& spec, const Blocks& start,
                            const GpOptions& opts);

// Block helpers
Blocks axpy(const Blocks& x, double a, const Blocks& y);  // x + a y
double inner(const Blocks& a, const Blocks& b);
double frobenius(const Blocks& a);

}  // namespace swipt
