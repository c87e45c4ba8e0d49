#pragma once

#include <Eigen/Dense>

#include <cmath>

namespace swipt {

// Two-variable ellipsoid {x : (x - c)^T A^{-1} (x - c) <= 1} over duals
// (secrecy, power), kept in the nonnegative orthant. A is carried as
// A = L L^T and updated through L; the cuts drive A toward a needle, where
// forming A first would lose its determinant to cancellation.
struct EllipsoidState {
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    Eigen::Matrix2d shape = Eigen::Matrix2d::Identity();   // A
    Eigen::Matrix2d factor = Eigen::Matrix2d::Identity();  // L
    int iteration = 0;

    static EllipsoidState ball(const Eigen::Vector2d& center, double r2);
    bool valid() const;
    double volume_factor() const { return std::abs(factor.determinant()); }  // sqrt(det A)
};

// Central cut along subgradient s of the (minimized) dual function.
// Throws NumericalError when s^T A s <= 0.
EllipsoidState ellipsoid_step(const EllipsoidState& state, const Eigen::Vector2d& s);

// sqrt(s^T A s): bound on the dual suboptimality at the center.
double ellipsoid_stop_metric(const EllipsoidState& state, const Eigen::Vector2d& s);

// ceil(8 ln(r l_s / eps)): iteration bound for a 2-D ball of radius r.
int ellipsoid_iteration_bound(double r, double max_subgradient_norm, double eps);

}  // namespace swipt
