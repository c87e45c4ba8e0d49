#include "support.hpp"

#include "swipt/ehm_p2.hpp"
#include "swipt/oracle.hpp"
#include "swipt/validation.hpp"
#include "swipt/wsehm_p3.hpp"

#include <doctest.h>

#include <cmath>

using namespace swipt;
using swipt::test::random_matrix;
using swipt::test::random_psd;

namespace {

P3Problem random_problem(CounterRng& rng, int k, double power, double r0) {
    P3Problem p;
    p.h = random_matrix(rng, 3, 2);
    for (int i = 0; i < k; ++i) {
        p.g.push_back(random_matrix(rng, 3, 2, 0.3));
        p.sigma2_e.push_back(1e-3 * (i + 1));
        p.eta.push_back(0.8);
        p.mu.push_back(1.0);
    }
    p.power = power;
    p.r0 = r0;
    return p;
}

CovarianceTriple random_triple(CounterRng& rng, double total) {
    return {random_psd(rng, 3, 0.6 * total), random_psd(rng, 3, 0.2 * total),
            random_psd(rng, 3, 0.2 * total)};
}

// One P = 1 W scalar link: |h|^2 = 4, |g|^2 = 1, unit noise at the ER.
P3Problem scalar_problem() {
    P3Problem p;
    p.h = CMatrix::Constant(1, 1, 2.0);
    p.g = {CMatrix::Constant(1, 1, 1.0)};
    p.sigma2_e = {1.0};
    p.eta = {0.8};
    p.mu = {1.0};
    p.power = 1.0;
    p.r0 = 0.5;
    return p;
}

}  // namespace

TEST_CASE("update_t: identities at zero, exact surrogate at the update point") {
    CounterRng rng(61, 0);
    const P3Problem p = random_problem(rng, 2, 2.0, 0.1);
    const AuxMatrices z = update_t(p, CovarianceTriple::zero(3));
    CHECK((z.t0 - CMatrix::Identity(2, 2)).norm() < 1e-14);
    for (const auto& t : z.tk) CHECK((t - CMatrix::Identity(2, 2)).norm() < 1e-14);

    for (int trial = 0; trial < 50; ++trial) {
        const CovarianceTriple x = random_triple(rng, 2.0);
        const auto exact = true_slacks(p, x);
        const auto sur = surrogate_slacks(p, x, update_t(p, x));
        for (int k = 0; k < 2; ++k) CHECK(sur[k] == doctest::Approx(exact[k]).epsilon(1e-9));
        // Any other T gives a lower bound.
        const auto other = surrogate_slacks(p, x, update_t(p, random_triple(rng, 2.0)));
        for (int k = 0; k < 2; ++k) CHECK(other[k] <= exact[k] + 1e-10);
    }
}

TEST_CASE("ws_gradients: finite differences with T held fixed") {
    CounterRng rng(62, 0);
    const P3Problem p = random_problem(rng, 2, 2.0, 0.05);
    for (int trial = 0; trial < 5; ++trial) {
        const CovarianceTriple x = random_triple(rng, 2.0);
        const AuxMatrices t = update_t(p, x);
        if (surrogate_slacks(p, x, t)[0] <= 0.05 || surrogate_slacks(p, x, t)[1] <= 0.05) continue;
        const double bt = 3.0, scale = 0.01;
        const TripleGradient g = ws_gradients(p, x, t, bt, scale);
        auto block = [&](int b) {
            return [&, b](const CMatrix& w) {
                CovarianceTriple y = x;
                (b == 0 ? y.info : b == 1 ? y.energy : y.an) = w;
                return ws_objective(p, y, t, bt, scale);
            };
        };
        const CMatrix fi = oracle::fd_gradient(block(0), x.info, 1e-6);
        const CMatrix fe = oracle::fd_gradient(block(1), x.energy, 1e-6);
        const CMatrix fv = oracle::fd_gradient(block(2), x.an, 1e-6);
        CHECK((fi - g.info).norm() <= 1e-5 * std::max(1.0, g.info.norm()));
        CHECK((fe - g.energy).norm() <= 1e-5 * std::max(1.0, g.energy.norm()));
        CHECK((fv - g.an).norm() <= 1e-5 * std::max(1.0, g.an.norm()));
    }
}

TEST_CASE("ws_gradients: energy and AN blocks differ only by the ER terms") {
    CounterRng rng(63, 0);
    const P3Problem p = random_problem(rng, 2, 2.0, 0.0);
    for (int trial = 0; trial < 10; ++trial) {
        const CovarianceTriple x = random_triple(rng, 2.0);
        const AuxMatrices t = update_t(p, x);
        const auto s = surrogate_slacks(p, x, t);
        if (s[0] <= 0.0 || s[1] <= 0.0) continue;
        const double bt = 7.0;
        const TripleGradient g = ws_gradients(p, x, t, bt);
        CMatrix expect = CMatrix::Zero(3, 3);
        for (int k = 0; k < 2; ++k) {
            const CMatrix& gk = p.g[k];
            const CMatrix psi = gk * (CMatrix::Identity(2, 2) + gk.adjoint() * x.an * gk).inverse() *
                                gk.adjoint();
            expect -= (psi - gk * t.tk[k] * gk.adjoint()) / (bt * s[k]);
        }
        CHECK((g.energy - g.an - expect).norm() < 1e-10 * std::max(1.0, expect.norm()));
    }
}

TEST_CASE("ws_gradients: vanishing barrier leaves the energy matrix") {
    CounterRng rng(64, 0);
    const P3Problem p = random_problem(rng, 1, 1.0, 0.0);
    CovarianceTriple x = CovarianceTriple::zero(3);
    x.info = CMatrix::Identity(3, 3) / 3.0;
    const TripleGradient g = ws_gradients(p, x, update_t(p, x), 1e12);
    const CMatrix m = p.energy_matrix();
    CHECK((g.info - m).norm() < 1e-9);
    CHECK((g.energy - m).norm() < 1e-9);
    CHECK((g.an - m).norm() < 1e-9);
}

TEST_CASE("kkt_residual: hand-built scalar optimum") {
    const P3Problem p = scalar_problem();
    CovarianceTriple x = CovarianceTriple::zero(1);
    x.info(0, 0) = 1.0;
    const auto slack = true_slacks(p, x);
    CHECK(slack[0] == doctest::Approx(std::log(2.5) - 0.5).epsilon(1e-14));
    CHECK(slack[0] == doctest::Approx(0.416290731874155).epsilon(1e-12));
    CHECK(p.energy_of(x) == doctest::Approx(0.8));

    const KktResidual r = kkt_residual(p, x, update_t(p, x), 1e10);
    CHECK(r.stationarity < 1e-8);
    CHECK(r.comp_slack_rate < 1e-8);
    CHECK(r.comp_slack_power < 1e-8);
    CHECK(r.dual_feas < 1e-8);
}

TEST_CASE("kkt_residual: perturbing a solution inflates the residual") {
    const ScenarioConfig cfg = default_scenario(2);
    const P3Problem p = make_p3_problem(draw_channels(cfg, 0), cfg.power, bits_to_nats(cfg.r0_bits));
    const P3Solution s = solve_p3(p, kkt_profile(cfg.tol));
    REQUIRE(s.feasible);
    const double base = s.kkt.max();
    CHECK(base < 1e-3 * std::max({1.0, cfg.power, cfg.r0_bits}));

    const EvdResult e = evd_psd_clipped(s.x.info);
    CovarianceTriple y = s.x;
    const CMatrix v = e.eigenvectors.col(0);
    y.info += 0.05 * p.power * (v * v.adjoint());
    const KktResidual r = kkt_residual(p, y, update_t(p, y), s.barrier_t);
    CHECK(r.max() >= 10.0 * base);
}

TEST_CASE("solve_p3: constraints, ascent, and no GP decreases") {
    const ScenarioConfig cfg = default_scenario(2);
    for (std::uint64_t trial = 0; trial < 2; ++trial) {
        const P3Problem p =
            make_p3_problem(draw_channels(cfg, trial), cfg.power, bits_to_nats(cfg.r0_bits));
        const P3Solution s = solve_p3(p, cfg.tol);
        REQUIRE(s.feasible);
        CHECK(s.x.total_trace() <= p.power * (1.0 + 1e-9));
        for (double v : true_slacks(p, s.x)) CHECK(v >= 0.0);
        for (const CMatrix* b : {&s.x.info, &s.x.energy, &s.x.an})
            CHECK(smallest_eigenvalue(*b) >= -1e-9 * p.power);
        CHECK(s.energy == doctest::Approx(p.energy_of(s.x)).epsilon(1e-12));
        CHECK(s.energy <= largest_eigenvalue(p.energy_matrix()) * p.power * (1.0 + 1e-9));
        for (std::size_t i = 1; i < s.outer_energies.size(); ++i)
            CHECK(s.outer_energies[i] >= s.outer_energies[i - 1]);
        CHECK(s.gp_decreases == 0);
    }
}

TEST_CASE("solve_p3: one ER without AN reproduces the P2 optimum") {
    const ScenarioConfig cfg = default_scenario(1);
    const SolverTolerances tol = reduction_profile(cfg.tol);
    const ChannelSet cs = draw_channels(cfg, 0);
    const P2Solution a = solve_p2(make_p1_problem(cs, cfg.power, bits_to_nats(cfg.c0_bits)), tol);
    P3Problem p = make_p3_problem(cs, cfg.power, bits_to_nats(cfg.c0_bits));
    p.force_v_zero = true;
    const P3Solution b = solve_p3(p, tol);
    REQUIRE(a.feasible);
    REQUIRE(b.feasible);
    CHECK(b.x.an.norm() == 0.0);
    CHECK(std::abs(a.energy - b.energy) <= 1e-3 * a.energy);
}

TEST_CASE("solve_p3: unattainable target is reported infeasible") {
    P3Problem p = scalar_problem();
    p.h(0, 0) = 0.5;  // the ER hears the source better than the IR
    const P3Solution s = solve_p3(p, SolverTolerances{});
    CHECK_FALSE(s.feasible);
    CHECK(s.report.status == SolveStatus::infeasible);
}
