#include "swipt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace swipt::oracle {

CMatrix fd_gradient(const std::function<double(const CMatrix&)>& f, const CMatrix& point,
                    double h) {
    const Eigen::Index n = point.rows();
    CMatrix grad = CMatrix::Zero(n, n);
    const double s = 1.0 / std::numbers::sqrt2;
    auto probe = [&](const CMatrix& dir, const std::string& name) {
        const double up = f(point + h * dir);
        const double down = f(point - h * dir);
        if (!std::isfinite(up) || !std::isfinite(down))
            throw FdError("fd_gradient: non-finite sample along " + name, name);
        grad += ((up - down) / (2.0 * h)) * dir;
    };
    for (Eigen::Index i = 0; i < n; ++i) {
        CMatrix e = CMatrix::Zero(n, n);
        e(i, i) = 1.0;
        probe(e, "E" + std::to_string(i) + std::to_string(i));
        for (Eigen::Index j = i + 1; j < n; ++j) {
            CMatrix re = CMatrix::Zero(n, n);
            re(i, j) = s;
            re(j, i) = s;
            probe(re, "Re" + std::to_string(i) + std::to_string(j));
            CMatrix im = CMatrix::Zero(n, n);
            im(i, j) = cd(0.0, s);
            im(j, i) = cd(0.0, -s);
            probe(im, "Im" + std::to_string(i) + std::to_string(j));
        }
    }
    return grad;
}

namespace {

std::vector<CMatrix> rebuild(const std::vector<EvdResult>& evd, const std::vector<RVector>& vals) {
    std::vector<CMatrix> out;
    for (std::size_t b = 0; b < evd.size(); ++b)
        out.push_back(evd[b].eigenvectors * vals[b].asDiagonal() * evd[b].eigenvectors.adjoint());
    return out;
}

RVector concat(const std::vector<EvdResult>& evd) {
    Eigen::Index total = 0;
    for (const auto& e : evd) total += e.eigenvalues.size();
    RVector all(total);
    Eigen::Index at = 0;
    for (const auto& e : evd) {
        all.segment(at, e.eigenvalues.size()) = e.eigenvalues;
        at += e.eigenvalues.size();
    }
    return all;
}

std::vector<RVector> split(const std::vector<EvdResult>& evd, const RVector& all) {
    std::vector<RVector> out;
    Eigen::Index at = 0;
    for (const auto& e : evd) {
        out.push_back(all.segment(at, e.eigenvalues.size()));
        at += e.eigenvalues.size();
    }
    return out;
}

std::vector<EvdResult> decompose(const std::vector<CMatrix>& blocks) {
    std::vector<EvdResult> evd;
    for (const auto& b : blocks) evd.push_back(evd_hermitian(b));
    return evd;
}

}  // namespace

std::vector<CMatrix> projection_reference(const std::vector<CMatrix>& blocks, double power) {
    const auto evd = decompose(blocks);
    const RVector e = concat(evd);
    auto used = [&](double shift) { return (e.array() - shift).cwiseMax(0.0).sum(); };
    double shift = 0.0;
    if (used(0.0) > power) {
        double lo = 0.0, hi = e.maxCoeff();
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (used(mid) > power ? lo : hi) = mid;
        }
        shift = 0.5 * (lo + hi);
    }
    const RVector clipped = (e.array() - shift).cwiseMax(0.0).matrix();
    return rebuild(evd, split(evd, clipped));
}

RVector eigenvalue_qp(const RVector& e, double power) {
    const Eigen::Index n = e.size();
    if (n > 24) throw std::invalid_argument("eigenvalue_qp: too many variables to enumerate");
    RVector best = RVector::Zero(n);
    double best_cost = INFINITY;
    const double tol = 1e-12 * std::max(1.0, power);
    // Each mask fixes the free set; try the budget both inactive and active.
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        double sum_free = 0.0;
        int count = 0;
        for (Eigen::Index i = 0; i < n; ++i)
            if (mask >> i & 1u) {
                sum_free += e[i];
                ++count;
            }
        for (int budget_active = 0; budget_active < 2; ++budget_active) {
            double rho = 0.0;
            if (budget_active) {
                if (count == 0) continue;
                rho = (sum_free - power) / count;
                if (rho < -tol) continue;
            }
            RVector l = RVector::Zero(n);
            bool ok = true;
            for (Eigen::Index i = 0; i < n && ok; ++i) {
                if (mask >> i & 1u) {
                    l[i] = e[i] - rho;
                    ok = l[i] >= -tol;
                } else {
                    ok = e[i] - rho <= tol;  // multiplier of l_i >= 0 is nonnegative
                }
            }
            if (!ok || l.sum() > power + tol) continue;
            l = l.cwiseMax(0.0);
            const double cost = (l - e).squaredNorm();
            if (cost < best_cost) {
                best_cost = cost;
                best = l;
            }
        }
    }
    return best;
}

std::vector<CMatrix> projection_qp(const std::vector<CMatrix>& blocks, double power) {
    const auto evd = decompose(blocks);
    return rebuild(evd, split(evd, eigenvalue_qp(concat(evd), power)));
}

void GridSpec::validate() const {
    if (power_points < 3 || angle_points < 3 || phase_points < 3)
        throw std::invalid_argument("GridSpec: every axis needs at least 3 points");
    if (!(power > 0.0)) throw std::invalid_argument("GridSpec: power must be positive");
}

namespace {

struct Direction {
    CVector u;
    CVector u_perp;
};

std::vector<Direction> directions(const GridSpec& spec) {
    std::vector<Direction> out;
    for (int a = 0; a < spec.angle_points; ++a) {
        const double theta = 0.5 * std::numbers::pi * a / (spec.angle_points - 1);
        for (int b = 0; b < spec.phase_points; ++b) {
            const double phi = 2.0 * std::numbers::pi * b / spec.phase_points;
            const cd ph = std::polar(1.0, phi);
            Direction d;
            d.u = CVector(2);
            d.u << std::cos(theta), ph * std::sin(theta);
            d.u_perp = CVector(2);
            d.u_perp << -std::conj(ph) * std::sin(theta), std::cos(theta);
            out.push_back(std::move(d));
            if (a == 0 || a == spec.angle_points - 1) break;  // phase is irrelevant at the poles
        }
    }
    return out;
}

double gain(const CMatrix& a, const CVector& u) { return std::norm((a.adjoint() * u)(0)); }

}  // namespace

GridResult grid_search_tiny(const CMatrix& h, const CMatrix& g, double sigma2_e, double eta,
                            double c0, const GridSpec& spec, TinyProblem which) {
    spec.validate();
    if (h.rows() != 2 || h.cols() != 1 || g.rows() != 2 || g.cols() != 1)
        throw std::invalid_argument("grid_search_tiny: expects 2x1 channels");
    const double weight = sigma2_e * eta;
    const double p_total = spec.power;
    const double target = std::exp(c0);
    const auto dirs = directions(spec);
    std::vector<double> hu, gu, hp, gp;
    for (const auto& d : dirs) {
        hu.push_back(gain(h, d.u));
        gu.push_back(gain(g, d.u));
        hp.push_back(gain(h, d.u_perp));
        gp.push_back(gain(g, d.u_perp));
    }
    const double g_norm2 = g.squaredNorm();
    std::vector<double> levels(spec.power_points);
    for (int i = 0; i < spec.power_points; ++i) levels[i] = p_total * i / (spec.power_points - 1);

    GridResult res;
    std::size_t best_dir = 0, best_dir_e = 0;
    double best_p1 = 0.0, best_p2 = 0.0, best_q = 0.0;
    if (which == TinyProblem::p1) {
        for (std::size_t d = 0; d < dirs.size(); ++d) {
            for (int i = 0; i < spec.power_points; ++i) {
                for (int j = 0; i + j < spec.power_points; ++j) {
                    const double p1 = levels[i], p2 = levels[j];
                    ++res.evaluated;
                    const double a = p1 * hu[d] + p2 * hp[d];
                    const double b = p1 * gu[d] + p2 * gp[d];
                    if (1.0 + a < target * (1.0 + b)) continue;
                    ++res.feasible_points;
                    const double e =
                        weight * (p1 * gu[d] + p2 * gp[d] + (p_total - p1 - p2) * g_norm2);
                    if (!res.any_feasible || e > res.best_energy) {
                        res.any_feasible = true;
                        res.best_energy = e;
                        best_dir = d;
                        best_p1 = p1;
                        best_p2 = p2;
                    }
                }
            }
        }
        if (res.any_feasible) {
            const auto& d = dirs[best_dir];
            res.wi = best_p1 * d.u * d.u.adjoint() + best_p2 * d.u_perp * d.u_perp.adjoint();
            const CVector top = g.col(0) / std::sqrt(g_norm2);
            res.we = (p_total - best_p1 - best_p2) * top * top.adjoint();
        }
        return res;
    }

    // P2: rank-one information beam (power p) and energy beam; the energy
    // power q only hurts the IR, so take the largest q the constraint allows.
    for (std::size_t d = 0; d < dirs.size(); ++d) {
        for (int i = 0; i < spec.power_points; ++i) {
            const double p = levels[i];
            const double a = p * hu[d];
            const double kappa = target * (1.0 + p * gu[d]);
            if (1.0 + a < kappa) {
                res.evaluated += static_cast<long long>(dirs.size());
                continue;
            }
            for (std::size_t de = 0; de < dirs.size(); ++de) {
                ++res.evaluated;
                double q = p_total - p;
                const double c = hu[de];
                if (kappa > 1.0 && c > 0.0) q = std::min(q, (1.0 + a - kappa) / ((kappa - 1.0) * c));
                q = std::max(q, 0.0);
                ++res.feasible_points;
                const double e = weight * (p * gu[d] + q * gu[de]);
                if (!res.any_feasible || e > res.best_energy) {
                    res.any_feasible = true;
                    res.best_energy = e;
                    best_dir = d;
                    best_dir_e = de;
                    best_p1 = p;
                    best_q = q;
                }
            }
        }
    }
    if (res.any_feasible) {
        res.wi = best_p1 * dirs[best_dir].u * dirs[best_dir].u.adjoint();
        res.we = best_q * dirs[best_dir_e].u * dirs[best_dir_e].u.adjoint();
    }
    return res;
}

}  // namespace swipt::oracle
