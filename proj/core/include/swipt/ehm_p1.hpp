#pragma once

#include "swipt/channel.hpp"
#include "swipt/ellipsoid.hpp"
#include "swipt/linalg.hpp"
#include "swipt/report.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace swipt {

// Single-ER problem in which both receivers cancel the energy signal.
struct P1Problem {
    CMatrix h;
    CMatrix g;
    double sigma2_e = 1.0;
    double eta = 1.0;
    double power = 1.0;
    double c0 = 0.0;  // nats

    double energy_weight() const { return sigma2_e * eta; }
    double energy_of(const CMatrix& w) const;  // sigma2_e eta Tr(G^H W G)
    double top_gain() const;                   // largest eigenvalue of G G^H
};

P1Problem make_p1_problem(const ChannelSet& cs, double power, double c0_nats);

struct ClosedFormResult {
    bool q_pd = false;
    CMatrix wi;               // valid when q_pd
    double q_min_eig = 0.0;
    CVector q_min_vec;        // eigenvector of the smallest eigenvalue of Q
};

// Maximizer of lambda ln det(I + H^H W H) - Tr(Q W) over W >= 0 with
// Q = lambda G(I + G^H W0 G)^{-1} G^H - sigma2_e eta G G^H + mu I (raw units).
ClosedFormResult inner_wi_closed_form(const CMatrix& h, const CMatrix& g, const CMatrix& wi0,
                                      double lambda, double mu, double eta, double sigma2_e);

struct EllipsoidRun {
    int iterations = 0;
    int bound = 0;            // ceil(8 ln(r l_s / eps1)) + 2 at exit
    double r = 0.0;
    double l_s = 0.0;
    bool met_stop = false;
    int domain_cuts = 0;      // steps taken where Q was not PD
    double max_det_ratio_error = 0.0;
    EllipsoidState start;
    Eigen::Vector2d end_center = Eigen::Vector2d::Zero();
};

struct InnerResult {
    CMatrix wi;
    bool feasible = true;
    SolveStatus status = SolveStatus::converged;
    double lambda = 0.0;  // dimensionless dual of the surrogate secrecy constraint
    double mu = 0.0;      // dimensionless dual of the power constraint
    int taylor_rounds = 0;
    int rejected_rounds = 0;
    std::vector<double> objective_trace;  // sigma2_e eta Tr(G^H W_I G) per accepted round
    std::vector<EllipsoidRun> runs;
    double comp_slack_rate = 0.0;
    double comp_slack_power = 0.0;
};

// Taylor loop with ellipsoid dual updates at split alpha. wi0 must satisfy
// the true secrecy constraint with trace <= alpha P.
InnerResult solve_inner(const P1Problem& p, double alpha, const CMatrix& wi0,
                        const SolverTolerances& tol);

// Rank-one covariance on the top eigenvector of G G^H with trace `budget`.
CMatrix optimal_we(const CMatrix& g, double budget);

struct FeasibilityResult {
    bool feasible = false;
    CMatrix wi;
    int rounds = 0;
    double secrecy = 0.0;  // true secrecy capacity at wi, nats
};

FeasibilityResult feasibility_init(const CMatrix& h, const CMatrix& g, double budget, double c0,
                                   const CMatrix& start, const SolverTolerances& tol);

struct GoldenResult {
    double alpha = 0.0;  // midpoint of the final bracket
    double value = 0.0;  // h at the midpoint
    double best_alpha = 0.0;
    double best_value = 0.0;
    double lo = 0.0, hi = 1.0;
    int evaluations = 0;
};

// Golden-section search for the maximum of h on [lo, hi], stopping when the
// bracket is narrower than zeta. best_* tracks the best point ever evaluated.
GoldenResult golden_section(const std::function<double(double)>& h, double zeta, double lo = 0.0,
                            double hi = 1.0);

struct P1Solution {
    CMatrix wi;
    CMatrix we;
    double alpha = 0.0;
    double energy = 0.0;
    bool feasible = false;
    SolverReport report;
    std::vector<EllipsoidRun> ellipsoid_runs;
    std::vector<std::vector<double>> inner_traces;  // one per alpha evaluation
};

// start: initial information covariance before repair (zero by default).
P1Solution solve_p1(const P1Problem& p, const SolverTolerances& tol,
                    const std::optional<CMatrix>& start = std::nullopt);

}  // namespace swipt
