#include "swipt/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace swipt {

double max_asymmetry(const CMatrix& a) {
    if (a.rows() != a.cols()) return INFINITY;
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

namespace {

void require_hermitian(const CMatrix& a) {
    if (a.rows() == 0 || a.rows() != a.cols())
        throw std::invalid_argument("expected a non-empty square matrix");
    const double asym = max_asymmetry(a);
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if (asym > kHermitianTol * scale)
        throw NumericalError("matrix is not Hermitian (max asymmetry " +
                                 std::to_string(asym) + ")",
                             asym);
}

EvdResult descending(const Eigen::SelfAdjointEigenSolver<CMatrix>& es) {
    EvdResult r;
    r.eigenvalues = es.eigenvalues().reverse();
    r.eigenvectors = es.eigenvectors().rowwise().reverse();
    return r;
}

}  // namespace

EvdResult evd_hermitian(const CMatrix& a) {
    require_hermitian(a);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(a));
    if (es.info() != Eigen::Success)
        throw NumericalError("eigendecomposition failed to converge", 0.0);
    return descending(es);
}

EvdResult evd_psd_clipped(const CMatrix& a) {
    EvdResult r = evd_hermitian(a);
    r.eigenvalues = r.eigenvalues.cwiseMax(0.0);
    return r;
}

CMatrix inv_sqrt_pd(const CMatrix& q) {
    EvdResult e = evd_hermitian(q);
    const double lmin = e.eigenvalues.minCoeff();
    if (!(lmin > kPdTol))
        throw NumericalError("matrix is not positive definite (smallest eigenvalue " +
                                 std::to_string(lmin) + ")",
                             lmin);
    const RVector s = e.eigenvalues.cwiseSqrt().cwiseInverse();
    CMatrix r = e.eigenvectors * s.asDiagonal() * e.eigenvectors.adjoint();
    return hermitian_part(r);
}

CMatrix sqrt_psd(const CMatrix& a) {
    EvdResult e = evd_psd_clipped(a);
    CMatrix r = e.eigenvectors * e.eigenvalues.cwiseSqrt().asDiagonal() *
                e.eigenvectors.adjoint();
    return hermitian_part(r);
}

RVector water_fill_levels(double level, const RVector& inverse_gains) {
    if (!(level >= 0.0) || !std::isfinite(level))
        throw std::invalid_argument("water level must be finite and nonnegative");
    for (Eigen::Index i = 0; i < inverse_gains.size(); ++i)
        if (!(inverse_gains[i] > 0.0) || !std::isfinite(inverse_gains[i]))
            throw std::invalid_argument("inverse gains must be positive and finite");
    return (level - inverse_gains.array()).cwiseMax(0.0).matrix();
}

double log_det_i_plus(const CMatrix& a) {
    const Eigen::Index n = a.rows();
    CMatrix m = CMatrix::Identity(n, n) + hermitian_part(a);
    Eigen::LLT<CMatrix> llt(m);
    if (llt.info() == Eigen::Success) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) s += std::log(llt.matrixL()(i, i).real());
        return 2.0 * s;
    }
    // Fallback for borderline inputs; non-positive eigenvalues give -inf.
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double v = es.eigenvalues()[i];
        if (!(v > 0.0)) return -INFINITY;
        s += std::log(v);
    }
    return s;
}

CMatrix inv_i_plus(const CMatrix& a) {
    const Eigen::Index n = a.rows();
    CMatrix m = CMatrix::Identity(n, n) + hermitian_part(a);
    Eigen::LLT<CMatrix> llt(m);
    if (llt.info() != Eigen::Success)
        throw NumericalError("I + A is not positive definite", smallest_eigenvalue(m));
    return hermitian_part(llt.solve(CMatrix::Identity(n, n)));
}

double largest_eigenvalue(const CMatrix& a) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(a), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

double smallest_eigenvalue(const CMatrix& a) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(a), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double spectral_norm(const CMatrix& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMatrix> svd(a);
    return svd.singularValues()(0);
}

}  // namespace swipt
