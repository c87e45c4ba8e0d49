#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace swipt {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Thrown when a decomposition precondition fails; `value` carries the
// offending quantity (max asymmetry, smallest eigenvalue, ...).
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double value)
        : std::runtime_error(what), value_(value) {}
    double value() const noexcept { return value_; }

private:
    double value_;
};

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPdTol = 1e-12;

struct EvdResult {
    RVector eigenvalues;   // descending
    CMatrix eigenvectors;  // columns, matching eigenvalues
};

double max_asymmetry(const CMatrix& a);
CMatrix hermitian_part(const CMatrix& a);

// Relative tolerance: asymmetry above kHermitianTol * max(1, |A|_max) rejects.
EvdResult evd_hermitian(const CMatrix& a);
EvdResult evd_psd_clipped(const CMatrix& a);  // negative drift set to 0

CMatrix inv_sqrt_pd(const CMatrix& q);
CMatrix sqrt_psd(const CMatrix& a);

RVector water_fill_levels(double level, const RVector& inverse_gains);

// ln det(I + A) for Hermitian A with I + A positive definite.
double log_det_i_plus(const CMatrix& a);
// Inverse of I + A for PSD A.
CMatrix inv_i_plus(const CMatrix& a);

double largest_eigenvalue(const CMatrix& a);
double smallest_eigenvalue(const CMatrix& a);
double spectral_norm(const CMatrix& a);

inline double trace_real(const CMatrix& a) { return a.trace().real(); }

// Re Tr(A^H B): the real inner product on Hermitian matrices.
inline double inner(const CMatrix& a, const CMatrix& b) {
    return (a.conjugate().cwiseProduct(b)).sum().real();
}

}  // namespace swipt
