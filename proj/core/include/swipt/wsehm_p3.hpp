#pragma once

#include "swipt/channel.hpp"
#include "swipt/gp.hpp"
#include "swipt/metrics.hpp"
#include "swipt/report.hpp"

#include <optional>
#include <vector>

namespace swipt {

struct P3Problem {
    CMatrix h;
    std::vector<CMatrix> g;
    std::vector<double> sigma2_e;
    std::vector<double> eta;
    std::vector<double> mu;
    double power = 1.0;
    double r0 = 0.0;  // nats
    bool ir_cancels_energy = false;
    bool force_we_zero = false;
    bool force_v_zero = false;

    int k() const { return static_cast<int>(g.size()); }
    double weight(int k) const { return sigma2_e[k] * mu[k] * eta[k]; }
    CMatrix energy_matrix() const;  // sum_k weight_k G_k G_k^H
    double energy_of(const CovarianceTriple& x) const;
};

P3Problem make_p3_problem(const ChannelSet& cs, double power, double r0_nats);

// Auxiliary matrices of the block Gauss-Seidel scheme.
struct AuxMatrices {
    CMatrix t0;
    std::vector<CMatrix> tk;
};

AuxMatrices update_t(const P3Problem& p, const CovarianceTriple& x);

// x_k(W; T) = theta_I - theta_{E,k} - R0: a minorant of the true secrecy
// slack, exact when T = update_t(x).
std::vector<double> surrogate_slacks(const P3Problem& p, const CovarianceTriple& x,
                                     const AuxMatrices& t);
// True slack C_I - C_{E,k} - R0 for each ER.
std::vector<double> true_slacks(const P3Problem& p, const CovarianceTriple& x);

// g = E / energy_scale + (1/t) sum_k ln x_k
double ws_objective(const P3Problem& p, const CovarianceTriple& x, const AuxMatrices& t,
                    double barrier_t, double energy_scale = 1.0);

struct TripleGradient {
    CMatrix info, energy, an;
};

TripleGradient ws_gradients(const P3Problem& p, const CovarianceTriple& x, const AuxMatrices& t,
                            double barrier_t, double energy_scale = 1.0);

// KKT residuals in raw units (watts); barrier_t multiplies raw energy.
KktResidual kkt_residual(const P3Problem& p, const CovarianceTriple& x, const AuxMatrices& t,
                         double barrier_t);

struct P3Solution {
    CovarianceTriple x;
    double energy = 0.0;
    bool feasible = false;
    SolverReport report;
    KktResidual kkt;
    AuxMatrices aux;
    double barrier_t = 0.0;  // raw-unit t of the last barrier solve
    std::vector<double> outer_energies;
    int gp_decreases = 0;
};

// `start` replaces the isotropic initial triple (it is still feasibility-repaired).
P3Solution solve_p3(const P3Problem& p, const SolverTolerances& tol,
                    const std::optional<CovarianceTriple>& start = std::nullopt);

// Used by solve_p3 when the isotropic start violates a secrecy constraint.
// Returns false if no strictly feasible point was found.
bool repair_p3_start(const P3Problem& p, CovarianceTriple& x, const SolverTolerances& tol);

}  // namespace swipt
