#include <benchmark/benchmark.h>

#include "ibdwaves/evolution.hpp"
#include "ibdwaves/integrate.hpp"
#include "ibdwaves/scalarwaves.hpp"
#include "ibdwaves/systemwaves.hpp"

using namespace ibdwaves;

static void BM_TemporalSystem(benchmark::State& st) {
    const auto p = ModelParams::from_sigma(0.75, 0.05);
    for (auto _ : st) benchmark::DoNotOptimize(solve_temporal_ds(0.5, 0.5, p, 50.0).times.size());
}
BENCHMARK(BM_TemporalSystem);

static void BM_CutoffShooting(benchmark::State& st) {
    const auto p = ModelParams::from_sigma(0.75, 0.05);
    for (auto _ : st) benchmark::DoNotOptimize(solve_mvp1_speed(p, 1e-10).speed);
}
BENCHMARK(BM_CutoffShooting)->Unit(benchmark::kMillisecond);

static void BM_UpperFamilyMinimum(benchmark::State& st) {
    const auto p = ModelParams::from_sigma(1.25, 0.05);
    for (auto _ : st) benchmark::DoNotOptimize(min_speed_family(ScalarProblem::MVP4, p, 1e-8).speed);
}
BENCHMARK(BM_UpperFamilyMinimum)->Unit(benchmark::kMillisecond);

static void BM_FptwNewton(benchmark::State& st) {
    const auto p = ModelParams::from_sigma(0.75, 0.05);
    BvpConfig cfg;
    cfg.N = static_cast<int>(st.range(0));
    const auto guess = leading_order_guess(WaveKind::FPTW, p, 0.0);
    for (auto _ : st) benchmark::DoNotOptimize(solve_evp(WaveKind::FPTW, p, std::nullopt, cfg, guess).profile.speed);
}
BENCHMARK(BM_FptwNewton)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

static void BM_LdsSteps(benchmark::State& st) {
    const auto p = ModelParams::from_sigma(0.75, 0.05);
    const auto init = heaviside_initial(Grid1D(-10, 90, static_cast<std::size_t>(st.range(0))), 0.5, 0.5, p);
    for (auto _ : st) benchmark::DoNotOptimize(simulate_lds(init, p, 1.0).steps);
    st.SetItemsProcessed(st.iterations() * 20 * st.range(0));
}
BENCHMARK(BM_LdsSteps)->Arg(1001)->Arg(4001)->Unit(benchmark::kMillisecond);

static void BM_RdsSteps(benchmark::State& st) {
    const auto p = ModelParams::from_sigma(0.75, 0.05).with_epsilon(1e-3);
    const auto init = heaviside_initial(Grid1D(-10, 90, 1001), 0.5, 0.5, p, true);
    for (auto _ : st) benchmark::DoNotOptimize(simulate_rds(init, p, 1.0).steps);
}
BENCHMARK(BM_RdsSteps)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
