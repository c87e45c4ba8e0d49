#include "swipt/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace swipt {

CovarianceTriple CovarianceTriple::zero(Eigen::Index n_t) {
    return {CMatrix::Zero(n_t, n_t), CMatrix::Zero(n_t, n_t), CMatrix::Zero(n_t, n_t)};
}

namespace {

CMatrix gram(const CMatrix& a, const CMatrix& w) { return a.adjoint() * w * a; }

void check_square(const CMatrix& w, Eigen::Index n, const char* what) {
    if (w.rows() != n || w.cols() != n)
        throw std::invalid_argument(std::string("dimension mismatch: ") + what);
}

}  // namespace

double harvested_energy(const std::vector<CMatrix>& g, const CovarianceTriple& x,
                        const std::vector<double>& mu, const std::vector<double>& eta,
                        const std::vector<double>& sigma2_e) {
    if (mu.size() != g.size() || eta.size() != g.size() || sigma2_e.size() != g.size())
        throw std::invalid_argument("harvested_energy: weight lists must match ER count");
    const CMatrix s = x.sum();
    double e = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        check_square(s, g[k].rows(), "harvested_energy");
        e += sigma2_e[k] * mu[k] * eta[k] * trace_real(gram(g[k], s));
    }
    return e;
}

double log_det_gain(const CMatrix& a, const CMatrix& w) {
    check_square(w, a.rows(), "log_det_gain");
    return log_det_i_plus(gram(a, w));
}

CMatrix log_det_gain_gradient(const CMatrix& a, const CMatrix& w) {
    return hermitian_part(a * inv_i_plus(gram(a, w)) * a.adjoint());
}

double secrecy_capacity_p1(const CMatrix& h, const CMatrix& g, const CMatrix& wi) {
    return log_det_gain(h, wi) - log_det_gain(g, wi);
}

double secrecy_rate_p2(const CMatrix& h, const CMatrix& g, const CMatrix& wi, const CMatrix& we) {
    return log_det_gain(h, wi + we) - log_det_gain(h, we) - log_det_gain(g, wi);
}

double ir_rate(const CMatrix& h, const CovarianceTriple& x, bool ir_cancels_energy) {
    const CMatrix interference = ir_cancels_energy ? x.an : CMatrix(x.energy + x.an);
    return log_det_gain(h, x.info + interference) - log_det_gain(h, interference);
}

double er_rate(const CMatrix& gk, const CovarianceTriple& x) {
    return log_det_gain(gk, x.info + x.an) - log_det_gain(gk, x.an);
}

double secrecy_rate_multi(const CMatrix& h, const std::vector<CMatrix>& g,
                          const CovarianceTriple& x, bool ir_cancels_energy) {
    double worst = -INFINITY;
    for (const auto& gk : g) worst = std::max(worst, er_rate(gk, x));
    return ir_rate(h, x, ir_cancels_energy) - worst;
}

double taylor_surrogate_s1(const CMatrix& h, const CMatrix& g, const CMatrix& wi,
                           const CMatrix& wi0) {
    const CMatrix b = log_det_gain_gradient(g, wi0);
    return log_det_gain(h, wi) - log_det_gain(g, wi0) - inner(b, wi - wi0);
}

double taylor_surrogate_s2(const CMatrix& h, const CMatrix& g, const CMatrix& wi,
                           const CMatrix& we, const CMatrix& wi0, const CMatrix& we0) {
    const CMatrix bh = log_det_gain_gradient(h, we0);
    const CMatrix bg = log_det_gain_gradient(g, wi0);
    return log_det_gain(h, wi + we) - log_det_gain(h, we0) - inner(bh, we - we0) -
           log_det_gain(g, wi0) - inner(bg, wi - wi0);
}

}  // namespace swipt
