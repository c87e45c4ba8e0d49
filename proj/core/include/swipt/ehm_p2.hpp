#pragma once

#include "swipt/ehm_p1.hpp"

namespace swipt {

// Same data as P1; the energy signal now interferes at the IR.
using P2Problem = P1Problem;

struct P2Options {
    bool force_we_zero = false;
};

struct P2Solution {
    CMatrix wi;
    CMatrix we;
    double energy = 0.0;
    bool feasible = false;
    SolverReport report;
    std::vector<double> round_objectives;  // energy at each accepted round
    int gp_decreases = 0;
};

P2Solution solve_p2(const P2Problem& p, const SolverTolerances& tol, const P2Options& opts = {});

}  // namespace swipt
