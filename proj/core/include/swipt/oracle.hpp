#pragma once

// Reference implementations used by tests and the validation suite. They share
// nothing with the solvers beyond the eigen/SVD helpers in linalg.

#include "swipt/channel.hpp"
#include "swipt/linalg.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace swipt::oracle {

struct FdError : std::runtime_error {
    FdError(const std::string& what, std::string direction_)
        : std::runtime_error(what), direction(std::move(direction_)) {}
    std::string direction;
};

// Central differences along the orthonormal Hermitian basis
// {E_ii, (E_ij + E_ji)/sqrt2, i(E_ij - E_ji)/sqrt2}. The result G satisfies
// df = Re Tr(G^H dW).
CMatrix fd_gradient(const std::function<double(const CMatrix&)>& f, const CMatrix& point,
                    double h);

// Projection onto {PSD blocks, total trace <= power} by bisection on the
// common eigenvalue shift.
std::vector<CMatrix> projection_reference(const std::vector<CMatrix>& blocks, double power);

// Same projection, eigenvalue part solved by enumerating active sets of the
// quadratic program min ||l - e||^2 s.t. l >= 0, sum l <= power.
std::vector<CMatrix> projection_qp(const std::vector<CMatrix>& blocks, double power);
RVector eigenvalue_qp(const RVector& e, double power);

struct GridSpec {
    int power_points = 61;
    int angle_points = 45;
    int phase_points = 24;
    double power = 1.0;

    void validate() const;
};

enum class TinyProblem { p1, p2 };

struct GridResult {
    bool any_feasible = false;
    double best_energy = 0.0;
    long long evaluated = 0;
    long long feasible_points = 0;
    CMatrix wi;
    CMatrix we;
};

// Exhaustive scan for n_t = 2 with scalar receivers. h and g are 2x1 and
// noise-normalized; c0 is in nats. P1 places the leftover power on the best
// energy beam exactly (it does not enter the secrecy constraint there); P2
// scans the energy direction and takes the largest admissible energy power.
GridResult grid_search_tiny(const CMatrix& h, const CMatrix& g, double sigma2_e, double eta,
                            double c0, const GridSpec& spec, TinyProblem which);

}  // namespace swipt::oracle
