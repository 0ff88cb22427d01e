// SPDX-License-Identifier: Apache-2.0
// Serial reference vs OpenMP trial loops.
#include "bsmimo/align.hpp"
#include "bsmimo/detect.hpp"

#include <benchmark/benchmark.h>

using namespace bsm;

namespace {

ScenarioConfig bench_cfg() {
  ScenarioConfig cfg;
  cfg.detector.p_tx = 0.05;
  return cfg;
}

void BM_discovery(benchmark::State& st) {
  const ScenarioConfig cfg = bench_cfg();
  const Exec exec = st.range(0) == 0 ? Exec::serial : Exec::parallel;
  for (auto _ : st) benchmark::DoNotOptimize(run_discovery_mc(cfg, 0.5, 256, 1, exec).p_d_hat.value());
  st.SetItemsProcessed(st.iterations() * 256);
  st.SetLabel(exec == Exec::serial ? "serial" : "parallel");
}

void BM_alignment(benchmark::State& st) {
  const ScenarioConfig cfg = bench_cfg();
  const Exec exec = st.range(0) == 0 ? Exec::serial : Exec::parallel;
  for (auto _ : st) benchmark::DoNotOptimize(run_alignment_mc(cfg, 0.25, 0.5, 64, 1, exec).p_out_hat.value());
  st.SetItemsProcessed(st.iterations() * 64);
  st.SetLabel(exec == Exec::serial ? "serial" : "parallel");
}

}  // namespace

BENCHMARK(BM_discovery)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_alignment)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
