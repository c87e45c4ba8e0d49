#pragma once

#include "swipt/linalg.hpp"

#include <vector>

namespace swipt {

// Information, energy, and artificial-noise covariances. Single-ER problems
// leave `an` at zero.
struct CovarianceTriple {
    CMatrix info;
    CMatrix energy;
    CMatrix an;

    static CovarianceTriple zero(Eigen::Index n_t);
    double total_trace() const { return trace_real(info) + trace_real(energy) + trace_real(an); }
    CMatrix sum() const { return info + energy + an; }
};

// Sum over ERs of sigma2_e * mu * eta * Tr(G^H (W_I + W_E + V) G).
double harvested_energy(const std::vector<CMatrix>& g, const CovarianceTriple& x,
                        const std::vector<double>& mu, const std::vector<double>& eta,
                        const std::vector<double>& sigma2_e);

// ln det(I + A^H W A)
double log_det_gain(const CMatrix& a, const CMatrix& w);

// Both receivers cancel the energy signal.
double secrecy_capacity_p1(const CMatrix& h, const CMatrix& g, const CMatrix& wi);

// Energy signal interferes at the IR; the ER cancels it.
double secrecy_rate_p2(const CMatrix& h, const CMatrix& g, const CMatrix& wi, const CMatrix& we);

// IR rate with W_E + V as interference (W_E dropped when the IR cancels it).
double ir_rate(const CMatrix& h, const CovarianceTriple& x, bool ir_cancels_energy = false);
// ER k rate: whitened by V only.
double er_rate(const CMatrix& gk, const CovarianceTriple& x);

double secrecy_rate_multi(const CMatrix& h, const std::vector<CMatrix>& g,
                          const CovarianceTriple& x, bool ir_cancels_energy = false);

// First-order expansion of the ER term about wi0; a minorant of
// secrecy_capacity_p1, exact at wi == wi0.
double taylor_surrogate_s1(const CMatrix& h, const CMatrix& g, const CMatrix& wi,
                           const CMatrix& wi0);

// Expands both subtracted terms of the P2 rate about (wi0, we0).
double taylor_surrogate_s2(const CMatrix& h, const CMatrix& g, const CMatrix& wi,
                           const CMatrix& we, const CMatrix& wi0, const CMatrix& we0);

// A (I + A^H W A)^{-1} A^H: gradient of log_det_gain in W.
CMatrix log_det_gain_gradient(const CMatrix& a, const CMatrix& w);

}  // namespace swipt
