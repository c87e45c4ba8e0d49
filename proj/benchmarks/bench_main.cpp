#include "swipt/ehm_p1.hpp"
#include "swipt/ehm_p2.hpp"
#include "swipt/gp.hpp"
#include "swipt/wsehm_p3.hpp"

#include <benchmark/benchmark.h>

using namespace swipt;

namespace {

CMatrix random_hermitian(CounterRng& rng, int n) {
    CMatrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = cd(rng.normal(), rng.normal());
    return 0.5 * (a + a.adjoint());
}

P1Problem p1_problem(int n_t) {
    ScenarioConfig cfg = default_scenario(1);
    cfg.n_t = n_t;
    return make_p1_problem(draw_channels(cfg, 0), cfg.power, bits_to_nats(cfg.c0_bits));
}

}  // namespace

static void BM_ProjectTriple(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    CounterRng rng(1, 0);
    const Blocks x{random_hermitian(rng, n), random_hermitian(rng, n), random_hermitian(rng, n)};
    const FeasibleSetSpec spec{10.0, {n, n, n}, {}};
    for (auto _ : state) benchmark::DoNotOptimize(project_feasible(x, spec));
}
BENCHMARK(BM_ProjectTriple)->Arg(3)->Arg(5)->Arg(8);

static void BM_InnerClosedForm(benchmark::State& state) {
    const P1Problem p = p1_problem(static_cast<int>(state.range(0)));
    const CMatrix w0 = CMatrix::Identity(p.h.rows(), p.h.rows());
    const double lam = p.energy_weight() * p.top_gain() * p.power;
    const double mu = 2.0 * p.energy_weight() * p.top_gain();
    for (auto _ : state)
        benchmark::DoNotOptimize(inner_wi_closed_form(p.h, p.g, w0, lam, mu, p.eta, p.sigma2_e));
}
BENCHMARK(BM_InnerClosedForm)->Arg(3)->Arg(5);

static void BM_SolveP1(benchmark::State& state) {
    const P1Problem p = p1_problem(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(solve_p1(p, SolverTolerances{}).energy);
}
BENCHMARK(BM_SolveP1)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

static void BM_SolveP2(benchmark::State& state) {
    const P2Problem p = p1_problem(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(solve_p2(p, SolverTolerances{}).energy);
}
BENCHMARK(BM_SolveP2)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

static void BM_SolveP3(benchmark::State& state) {
    const ScenarioConfig cfg = default_scenario(static_cast<int>(state.range(0)));
    const P3Problem p = make_p3_problem(draw_channels(cfg, 0), cfg.power, bits_to_nats(cfg.r0_bits));
    for (auto _ : state) benchmark::DoNotOptimize(solve_p3(p, SolverTolerances{}).energy);
}
BENCHMARK(BM_SolveP3)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
