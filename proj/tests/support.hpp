#pragma once

#include "swipt/channel.hpp"
#include "swipt/linalg.hpp"

#include <vector>

namespace swipt::test {

inline CMatrix random_matrix(CounterRng& rng, Eigen::Index rows, Eigen::Index cols,
                             double variance = 1.0) {
    CMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.complex_normal(variance);
    return m;
}

inline CMatrix random_hermitian(CounterRng& rng, Eigen::Index n) {
    const CMatrix a = random_matrix(rng, n, n);
    return 0.5 * (a + a.adjoint());
}

// Wishart-like PSD matrix scaled to the given trace.
inline CMatrix random_psd(CounterRng& rng, Eigen::Index n, double trace, Eigen::Index rank = -1) {
    const CMatrix a = random_matrix(rng, n, rank < 0 ? n : rank);
    CMatrix w = a * a.adjoint();
    w = 0.5 * (w + w.adjoint());
    return w * (trace / trace_real(w));
}

inline CMatrix random_pd(CounterRng& rng, Eigen::Index n) {
    return random_psd(rng, n, static_cast<double>(n)) + 0.1 * CMatrix::Identity(n, n);
}

// Deterministic ln det via eigenvalues of the Gram matrix; independent of the
// Cholesky path used by the library.
inline double log_det_eig(const CMatrix& a) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (a + a.adjoint()));
    return es.eigenvalues().array().log().sum();
}

}  // namespace swipt::test
