#include "swipt/ellipsoid.hpp"

#include "swipt/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace swipt {

EllipsoidState EllipsoidState::ball(const Eigen::Vector2d& center, double r2) {
    EllipsoidState s;
    s.center = center.cwiseMax(0.0);
    s.shape = r2 * Eigen::Matrix2d::Identity();
    s.factor = std::sqrt(r2) * Eigen::Matrix2d::Identity();
    return s;
}

bool EllipsoidState::valid() const {
    if (!shape.allFinite() || !center.allFinite()) return false;
    if (std::abs(shape(0, 1) - shape(1, 0)) > 1e-12 * shape.cwiseAbs().maxCoeff()) return false;
    return shape(0, 0) > 0.0 && shape.determinant() > 0.0 && (center.array() >= 0.0).all();
}

EllipsoidState ellipsoid_step(const EllipsoidState& state, const Eigen::Vector2d& s) {
    const Eigen::Vector2d u = state.factor.transpose() * s;
    const double sas = u.squaredNorm();
    if (!(sas > 0.0) || !std::isfinite(sas))
        throw NumericalError("ellipsoid_step: s^T A s is not positive", sas);
    const Eigen::Vector2d uh = u / std::sqrt(sas);
    EllipsoidState next;
    next.center = (state.center - state.factor * uh / 3.0).cwiseMax(0.0);
    // A+ = 4/3 (A - 2/3 A s s^T A / s^T A s) = L+ L+^T with
    // L+ = sqrt(4/3) L (I - (1 - 1/sqrt3) uh uh^T).
    const double shrink = 1.0 - 1.0 / std::sqrt(3.0);
    next.factor = std::sqrt(4.0 / 3.0) *
                  (state.factor - shrink * (state.factor * uh) * uh.transpose());
    Eigen::Matrix2d a = next.factor * next.factor.transpose();
    a(0, 1) = a(1, 0) = 0.5 * (a(0, 1) + a(1, 0));
    next.shape = a;
    next.iteration = state.iteration + 1;
    return next;
}

double ellipsoid_stop_metric(const EllipsoidState& state, const Eigen::Vector2d& s) {
    return (state.factor.transpose() * s).norm();
}

int ellipsoid_iteration_bound(double r, double max_subgradient_norm, double eps) {
    const double arg = r * max_subgradient_norm / eps;
    if (!(arg > 1.0)) return 0;
    return static_cast<int>(std::ceil(8.0 * std::log(arg)));
}

}  // namespace swipt
