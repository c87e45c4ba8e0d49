#include "support.hpp"

#include "swipt/ehm_p1.hpp"
#include "swipt/ehm_p2.hpp"
#include "swipt/oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace swipt;
using swipt::test::random_hermitian;
using swipt::test::random_matrix;
using swipt::test::random_pd;
using swipt::test::random_psd;

TEST_CASE("fd_gradient: linear functionals and the log-det identity") {
    CounterRng rng(71, 0);
    const CMatrix c = random_hermitian(rng, 3);
    const auto linear = [&](const CMatrix& w) { return (c.adjoint() * w).trace().real(); };
    CHECK((oracle::fd_gradient(linear, random_psd(rng, 3, 1.0), 1e-3) - c).norm() < 1e-10);

    // d ln det X = Tr(X^{-1} dX)
    const CMatrix x = random_pd(rng, 3);
    const auto ld = [](const CMatrix& w) { return swipt::test::log_det_eig(w); };
    CHECK((oracle::fd_gradient(ld, x, 1e-5) - x.inverse()).norm() < 1e-6);

    const auto bad = [](const CMatrix& w) { return w(0, 0).real() > 0.0 ? std::log(w(1, 1).real()) : 0.0; };
    CMatrix at = CMatrix::Identity(2, 2);
    at(1, 1) = 1e-9;
    CHECK_THROWS_AS(oracle::fd_gradient(bad, at, 1e-3), oracle::FdError);
    try {
        oracle::fd_gradient(bad, at, 1e-3);
    } catch (const oracle::FdError& e) {
        CHECK(e.direction == "E11");
    }
}

TEST_CASE("projection_reference: feasible input and the scalar case") {
    CounterRng rng(72, 0);
    const std::vector<CMatrix> feasible{random_psd(rng, 3, 0.4), random_psd(rng, 3, 0.5)};
    const auto same = oracle::projection_reference(feasible, 1.0);
    for (int b = 0; b < 2; ++b) CHECK((same[b] - feasible[b]).norm() < 1e-10);

    const auto s = oracle::projection_reference({CMatrix::Constant(1, 1, 5.0)}, 2.0);
    CHECK(s[0](0, 0).real() == doctest::Approx(2.0).epsilon(1e-10));

    const RVector l = oracle::eigenvalue_qp(RVector::Constant(1, -3.0), 1.0);
    CHECK(l(0) == 0.0);
}

TEST_CASE("GridSpec: validation") {
    oracle::GridSpec g;
    CHECK_NOTHROW(g.validate());
    g.angle_points = 2;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = {};
    g.power = 0.0;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("grid_search_tiny: zero target puts everything on the energy beam") {
    CounterRng rng(73, 0);
    const CMatrix h = random_matrix(rng, 2, 1), g = random_matrix(rng, 2, 1);
    const double power = 3.0, s2 = 1e-3, eta = 0.7;
    oracle::GridSpec spec;
    spec.power = power;
    const double bound = s2 * eta * g.squaredNorm() * power;
    const auto a = oracle::grid_search_tiny(h, g, s2, eta, 0.0, spec, oracle::TinyProblem::p1);
    REQUIRE(a.any_feasible);
    CHECK(a.best_energy == doctest::Approx(bound).epsilon(1e-9));
    // P2 scans the energy direction, so it only gets within the grid resolution.
    const auto b = oracle::grid_search_tiny(h, g, s2, eta, 0.0, spec, oracle::TinyProblem::p2);
    REQUIRE(b.any_feasible);
    CHECK(b.best_energy <= bound * (1.0 + 1e-12));
    CHECK(b.best_energy >= 0.99 * bound);
}

TEST_CASE("grid_search_tiny: weaker IR along the ER direction is infeasible") {
    ScenarioConfig cfg = default_scenario(1);
    cfg.n_t = 2;
    cfg.n_i = 1;
    cfg.n_e = {1};
    CMatrix g(2, 1), h(2, 1);
    g << cd(0.6, 0.2), cd(-0.3, 0.5);
    h = 0.8 * g;
    const P1Problem p = make_p1_problem(make_channels(cfg, h, {g}), cfg.power, 0.2);
    oracle::GridSpec spec;
    spec.power = cfg.power;
    const auto a = oracle::grid_search_tiny(h, g, p.sigma2_e, p.eta, p.c0, spec, oracle::TinyProblem::p1);
    CHECK_FALSE(a.any_feasible);
    CHECK(a.feasible_points == 0);
    CHECK(a.evaluated > 0);
    CHECK_FALSE(solve_p1(p, SolverTolerances{}).feasible);
    CHECK_FALSE(solve_p2(p, SolverTolerances{}).feasible);
}

TEST_CASE("grid_search_tiny: the solvers match or beat the grid") {
    ScenarioConfig cfg = default_scenario(1);
    cfg.n_t = 2;
    cfg.n_i = 1;
    cfg.n_e = {1};
    oracle::GridSpec spec;
    spec.power = cfg.power;
    for (std::uint64_t trial = 0; trial < 3; ++trial) {
        const P1Problem p = make_p1_problem(draw_channels(cfg, trial), cfg.power, bits_to_nats(1.0));
        const auto a = oracle::grid_search_tiny(p.h, p.g, p.sigma2_e, p.eta, p.c0, spec,
                                                oracle::TinyProblem::p1);
        const auto b = oracle::grid_search_tiny(p.h, p.g, p.sigma2_e, p.eta, p.c0, spec,
                                                oracle::TinyProblem::p2);
        if (a.any_feasible) {
            const P1Solution s = solve_p1(p, cfg.tol);
            REQUIRE(s.feasible);
            CHECK(s.energy >= 0.98 * a.best_energy);
        }
        if (b.any_feasible) {
            const P2Solution s = solve_p2(p, cfg.tol);
            REQUIRE(s.feasible);
            CHECK(s.energy >= 0.98 * b.best_energy);
        }
    }
}
