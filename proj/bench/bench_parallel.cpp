// Serial reference path against the OpenMP path for the parallel kernels.
#include "worci/ci_banach.hpp"
#include "worci/ci_finite.hpp"
#include "worci/simharness.hpp"

#include <benchmark/benchmark.h>

#include <numeric>

using namespace worci;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

void label(benchmark::State& st) { st.SetLabel(st.range(0) ? "openmp" : "serial"); }

void BM_GramBuild(benchmark::State& st) {
    const auto data = mixture_vectors(st.range(1), 8, 4, 1);
    for (auto _ : st) benchmark::DoNotOptimize(GramCache(data, Kernel{KernelKind::matern32, 4.0}, exec_of(st)));
    label(st);
}
BENCHMARK(BM_GramBuild)->ArgsProduct({{0, 1}, {500, 1000}})->Unit(benchmark::kMillisecond);

void BM_MmdDeviation(benchmark::State& st) {
    const auto data = mixture_vectors(1000, 8, 4, 2);
    const GramCache gram(data, Kernel{KernelKind::matern32, 4.0}, Exec::parallel);
    const auto idx = sample_indices_wor(1000, std::size_t(st.range(1)), 3);
    for (auto _ : st) benchmark::DoNotOptimize(gram.deviation(idx, exec_of(st)));
    label(st);
}
BENCHMARK(BM_MmdDeviation)->ArgsProduct({{0, 1}, {100, 500}})->Unit(benchmark::kMicrosecond);

void BM_E2Trials(benchmark::State& st) {
    auto cfg = defaults_for("E2");
    cfg.trials = int(st.range(1));
    cfg.alphas = {1e-10};
    for (auto _ : st) benchmark::DoNotOptimize(run_E2_finite_widths(cfg, exec_of(st)));
    label(st);
}
BENCHMARK(BM_E2Trials)->ArgsProduct({{0, 1}, {50}})->Unit(benchmark::kMillisecond);

void BM_E3Trials(benchmark::State& st) {
    auto cfg = defaults_for("E3");
    cfg.trials = int(st.range(1));
    cfg.beta_params = {{2.0, 5.0}};
    for (auto _ : st) benchmark::DoNotOptimize(run_E3_as_ci(cfg, exec_of(st)));
    label(st);
}
BENCHMARK(BM_E3Trials)->ArgsProduct({{0, 1}, {20}})->Unit(benchmark::kMillisecond);

void BM_E5Harness(benchmark::State& st) {
    auto cfg = defaults_for("E5");
    cfg.N = 400;
    cfg.n_step = 100;
    cfg.trials = int(st.range(1));
    for (auto _ : st) benchmark::DoNotOptimize(run_E5_mmd(cfg, exec_of(st)));
    label(st);
}
BENCHMARK(BM_E5Harness)->ArgsProduct({{0, 1}, {20}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
