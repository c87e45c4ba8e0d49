#include "support.hpp"

#include "swipt/gp.hpp"
#include "swipt/oracle.hpp"
#include "swipt/wsehm_p3.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace swipt;
using swipt::test::random_hermitian;
using swipt::test::random_matrix;
using swipt::test::random_psd;

namespace {

double bisect_rho(const RVector& e, double power) {
    auto used = [&](double r) { return (e.array() - r).cwiseMax(0.0).sum(); };
    if (used(0.0) <= power) return 0.0;
    double lo = 0.0, hi = e.maxCoeff();
    for (int i = 0; i < 300; ++i) {
        const double mid = 0.5 * (lo + hi);
        (used(mid) > power ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Blocks random_tuple(CounterRng& rng, int n, double scale) {
    Blocks b;
    for (int i = 0; i < 3; ++i) b.push_back(scale * random_hermitian(rng, n));
    return b;
}

double distance(const Blocks& a, const Blocks& b) { return frobenius(axpy(a, -1.0, b)); }

CMatrix diag(std::initializer_list<double> v) {
    RVector d(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) d[i++] = x;
    return d.cast<cd>().asDiagonal();
}

}  // namespace

TEST_CASE("find_rho: inactive and active budgets") {
    RVector a(2);
    a << 1.0, 1.0;
    CHECK(find_rho(a, 4.0) == 0.0);
    RVector b(2);
    b << 3.0, 1.0;
    CHECK(find_rho(b, 2.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(find_rho(b, -1.0), std::invalid_argument);
}

TEST_CASE("find_rho: agrees with bisection and satisfies the budget") {
    CounterRng rng(41, 0);
    for (int trial = 0; trial < 50; ++trial) {
        RVector e(9);
        for (int i = 0; i < 9; ++i) e[i] = 4.0 * rng.normal();
        const double power = 5.0 * rng.uniform();
        const double rho = find_rho(e, power);
        CHECK(std::abs(rho - bisect_rho(e, power)) < 1e-10);
        const double used = (e.array() - rho).cwiseMax(0.0).sum();
        if (rho > 0.0) CHECK(std::abs(used - power) <= 1e-10 * std::max(1.0, power));
        else CHECK(used <= power + 1e-12);
    }
}

TEST_CASE("project_feasible: hand water-fill on diagonal blocks") {
    const FeasibleSetSpec spec{5.0, {2, 2, 2}, {}};
    const Blocks out = project_feasible({diag({3, 1}), diag({2, 0}), diag({1, 1})}, spec);
    CHECK((out[0] - diag({2.4, 0.4})).norm() < 1e-12);
    CHECK((out[1] - diag({1.4, 0.0})).norm() < 1e-12);
    CHECK((out[2] - diag({0.4, 0.4})).norm() < 1e-12);
}

TEST_CASE("project_feasible: feasible input is returned unchanged") {
    CounterRng rng(42, 0);
    const Blocks x{random_psd(rng, 3, 1.0), random_psd(rng, 3, 1.0), random_psd(rng, 3, 0.5)};
    const Blocks p = project_feasible(x, {3.0, {3, 3, 3}, {}});
    CHECK(distance(p, x) < 1e-12);
}

TEST_CASE("project_feasible: frozen blocks are held at zero") {
    CounterRng rng(43, 0);
    const Blocks x = random_tuple(rng, 3, 1.0);
    const Blocks p = project_feasible(x, {2.0, {3, 3, 3}, {false, true, false}});
    CHECK(p[1].norm() == 0.0);
    CHECK(trace_real(p[0]) + trace_real(p[2]) <= 2.0 + 1e-12);
}

TEST_CASE("project_feasible: oracles, idempotence, and the variational inequality") {
    CounterRng rng(44, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const double power = 0.5 + 4.0 * rng.uniform();
        const FeasibleSetSpec spec{power, {3, 3, 3}, {}};
        const Blocks x = random_tuple(rng, 3, 1.5);
        const Blocks p = project_feasible(x, spec);
        CHECK(distance(p, oracle::projection_reference(x, power)) < 1e-7);
        CHECK(distance(p, oracle::projection_qp(x, power)) < 1e-7);
        CHECK(distance(project_feasible(p, spec), p) < 1e-10);

        double total = 0.0;
        for (const auto& b : p) {
            total += trace_real(b);
            CHECK(smallest_eigenvalue(b) >= -1e-12);
        }
        CHECK(total <= power * (1.0 + 1e-8));

        const Blocks diff = axpy(x, -1.0, p);
        for (int s = 0; s < 50; ++s) {
            const double share = power * rng.uniform();
            const Blocks z{random_psd(rng, 3, share / 3.0), random_psd(rng, 3, share / 3.0),
                           random_psd(rng, 3, share / 3.0)};
            CHECK(inner(diff, axpy(z, -1.0, p)) <= 1e-8);
        }
    }
}

TEST_CASE("project_feasible: nearer than random feasible points") {
    CounterRng rng(45, 0);
    for (int trial = 0; trial < 10; ++trial) {
        const double power = 2.0;
        const Blocks x = random_tuple(rng, 3, 1.0);
        const double d = distance(project_feasible(x, {power, {3, 3, 3}, {}}), x);
        int closer = 0;
        for (int s = 0; s < 10000; ++s) {
            const double share = power * rng.uniform();
            const Blocks z{random_psd(rng, 3, share * 0.5), random_psd(rng, 3, share * 0.3),
                           random_psd(rng, 3, share * 0.2)};
            if (distance(z, x) < d - 1e-12) ++closer;
        }
        CHECK(closer == 0);
    }
}

TEST_CASE("armijo_step: zero direction and a concave parabola") {
    const ScalarOracle g = [](const Blocks& x) {
        const double v = x[0](0, 0).real();
        return -v * v;
    };
    Blocks x{CMatrix::Constant(1, 1, 1.0)};
    const Blocks grad{CMatrix::Constant(1, 1, -2.0)};

    const ArmijoResult zero = armijo_step(g, x, g(x), grad, {CMatrix::Zero(1, 1)}, {});
    CHECK(zero.step == 1.0);
    CHECK(zero.value == g(x));

    const ArmijoResult r = armijo_step(g, x, g(x), grad, {CMatrix::Constant(1, 1, -2.0)}, {});
    CHECK(r.accepted);
    CHECK(r.step > 0.0);
    CHECK(r.step <= 1.0);
    CHECK(r.value >= g(x));
    CHECK(r.step == doctest::Approx(0.5));  // q2 = 1 lands on -1 (no gain); 0.5 hits the peak
}

TEST_CASE("gp_maximize: linear objective concentrates on the top eigenvector") {
    CounterRng rng(46, 0);
    const CMatrix a = random_matrix(rng, 4, 4);
    const CMatrix c = a * a.adjoint();
    const ScalarOracle g = [&](const Blocks& x) { return inner(c, x[0]); };
    const GradientOracle dg = [&](const Blocks&) { return Blocks{c}; };
    const FeasibleSetSpec spec{3.0, {4}, {}};
    GpOptions opts;
    opts.q1 = 0.3;
    opts.xi1 = 1e-12;
    const GpResult r = gp_maximize(g, dg, spec, {CMatrix::Identity(4, 4) * 0.25}, opts);
    const EvdResult e = evd_hermitian(c);
    const CMatrix expect = 3.0 * e.eigenvectors.col(0) * e.eigenvectors.col(0).adjoint();
    CHECK((r.x[0] - expect).norm() < 1e-6);
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] >= r.trace[i - 1] - 1e-9);

    // Started at the maximizer, the first step leaves it unchanged.
    const GpResult fixed = gp_maximize(g, dg, spec, {expect}, opts);
    CHECK(fixed.iterations <= 1);
    CHECK((fixed.x[0] - expect).norm() < 1e-10);
}

TEST_CASE("gp_maximize: spectral steps reach the same maximizer") {
    CounterRng rng(47, 0);
    const CMatrix target = random_psd(rng, 3, 1.0);
    const ScalarOracle g = [&](const Blocks& x) {
        return -std::pow((x[0] - target).norm(), 2);
    };
    const GradientOracle dg = [&](const Blocks& x) { return Blocks{-2.0 * (x[0] - target)}; };
    GpOptions opts;
    opts.q1 = 0.01;
    opts.xi1 = 1e-14;
    opts.max_iters = 20000;
    const FeasibleSetSpec spec{5.0, {3}, {}};
    const GpResult plain = gp_maximize(g, dg, spec, {CMatrix::Zero(3, 3)}, opts);
    opts.spectral_step = true;
    const GpResult bb = gp_maximize(g, dg, spec, {CMatrix::Zero(3, 3)}, opts);
    CHECK((plain.x[0] - target).norm() < 1e-5);
    CHECK((bb.x[0] - target).norm() < 1e-5);
    CHECK(bb.iterations <= plain.iterations);
}

TEST_CASE("gp_maximize: rejects a non-finite start") {
    const ScalarOracle g = [](const Blocks&) { return -INFINITY; };
    const GradientOracle dg = [](const Blocks& x) { return x; };
    CHECK_THROWS_AS(gp_maximize(g, dg, {1.0, {1}, {}}, {CMatrix::Zero(1, 1)}, {}),
                    std::invalid_argument);
}

namespace {

// A two-ER barrier subproblem built from the P3 pieces.
struct P3Inner {
    P3Problem p;
    AuxMatrices t;
    CovarianceTriple start;
};

P3Inner make_p3_inner(std::uint64_t trial) {
    ScenarioConfig cfg = default_scenario(2);
    cfg.n_t = 3;
    cfg.n_i = 2;
    cfg.n_e = {2, 2};
    P3Inner s;
    s.p = make_p3_problem(draw_channels(cfg, trial), cfg.power, bits_to_nats(0.5));
    const double each = cfg.power / (3.0 * cfg.n_t);
    s.start = {each * CMatrix::Identity(3, 3), each * CMatrix::Identity(3, 3),
               each * CMatrix::Identity(3, 3)};
    REQUIRE(repair_p3_start(s.p, s.start, SolverTolerances{}));
    s.t = update_t(s.p, s.start);
    return s;
}

CovarianceTriple to_triple(const Blocks& b) { return {b[0], b[1], b[2]}; }

}  // namespace

TEST_CASE("gp_maximize: P3 subproblem survives a random-search refinement") {
    P3Inner s = make_p3_inner(1);
    const double scale = largest_eigenvalue(s.p.energy_matrix()) * s.p.power;
    const double t = 10.0;
    const ScalarOracle g = [&](const Blocks& b) -> double {
        const CovarianceTriple x = to_triple(b);
        for (double v : surrogate_slacks(s.p, x, s.t))
            if (!(v > 0.0)) return -INFINITY;
        return ws_objective(s.p, x, s.t, t, scale);
    };
    const GradientOracle dg = [&](const Blocks& b) {
        const TripleGradient gr = ws_gradients(s.p, to_triple(b), s.t, t, scale);
        return Blocks{gr.info, gr.energy, gr.an};
    };
    const FeasibleSetSpec spec{s.p.power, {3, 3, 3}, {}};
    GpOptions opts;
    opts.q1 = 0.1 * s.p.power;
    opts.xi1 = 1e-10;
    opts.max_iters = 20000;
    const GpResult r = gp_maximize(g, dg, spec, {s.start.info, s.start.energy, s.start.an}, opts);
    CHECK(r.decreases == 0);

    CounterRng rng(48, 0);
    Blocks best = r.x;
    double best_v = g(best);
    for (int step = 0; step < 100000; ++step) {
        const double radius = s.p.power * std::pow(10.0, -1.0 - 4.0 * rng.uniform());
        Blocks y = best;
        for (auto& m : y) m += radius * random_hermitian(rng, 3);
        y = project_feasible(y, spec);
        const double v = g(y);
        if (v > best_v) {
            best = std::move(y);
            best_v = v;
        }
    }
    CHECK(best_v - r.value <= 1e-3 * std::abs(r.value));
}

TEST_CASE("barrier_outer: degenerate and counted schedules") {
    const CMatrix c = CMatrix::Identity(2, 2);
    BarrierProblem prob;
    prob.objective = [&](const Blocks& x) { return inner(c, x[0]); };
    prob.objective_gradient = [&](const Blocks&) { return Blocks{c}; };
    prob.slacks = [](const Blocks& x) {
        return std::vector<double>{1.0 - trace_real(x[0]) / 4.0, 0.5, 0.25};
    };
    prob.weighted_slack_gradient = [](const Blocks&, const std::vector<double>& w) {
        return Blocks{-(w[0] / 4.0) * CMatrix::Identity(2, 2)};
    };
    const FeasibleSetSpec spec{2.0, {2}, {}};
    GpOptions opts;
    opts.q1 = 0.2;

    const BarrierResult none = barrier_outer(prob, {1.0, 3.0, 1e-6}, 0, spec,
                                             {CMatrix::Identity(2, 2) * 0.1}, opts);
    CHECK(none.t_updates == 0);
    CHECK(none.objective_per_t.size() == 1);

    const BarrierResult full = barrier_outer(prob, {1.0, 3.0, 1e-6}, 3, spec,
                                             {CMatrix::Identity(2, 2) * 0.1}, opts);
    CHECK(full.t_updates == 14);
    CHECK(3.0 / (full.final_t * 3.0) < 1e-6);
    // The barrier contribution shrinks as t grows.
    CHECK(std::abs(full.barrier_per_t.back()) < std::abs(full.barrier_per_t.front()));
    for (std::size_t i = 1; i < full.barrier_per_t.size(); ++i)
        CHECK(std::abs(full.barrier_per_t[i]) <= std::abs(full.barrier_per_t[i - 1]) + 1e-12);

    CHECK_THROWS_AS(barrier_outer(prob, {}, 3, spec, {CMatrix::Identity(2, 2) * 4.0}, opts),
                    std::invalid_argument);
}
