#include <benchmark/benchmark.h>

#include <cmath>

#include "tcost/gap_solver.hpp"
#include "tcost/metrics.hpp"
#include "tcost/shadow.hpp"
#include "tcost/simulator.hpp"
#include "tcost/spread_optimizer.hpp"

namespace {

const tcost::MarketParams kMarket{0.08, 0.16, 0.01};
const tcost::Preferences kPrefs{0.03125};

void BM_SolveGap(benchmark::State& state) {
  tcost::MarketParams m = kMarket;
  m.epsilon = std::pow(10.0, -static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(tcost::solve_gap(m, kPrefs));
}
BENCHMARK(BM_SolveGap)->DenseRange(2, 4);

void BM_ComputeMetrics(benchmark::State& state) {
  const auto gap = tcost::solve_gap(kMarket, kPrefs);
  for (auto _ : state) benchmark::DoNotOptimize(tcost::compute_metrics(gap));
}
BENCHMARK(BM_ComputeMetrics);

void BM_EvalW(benchmark::State& state) {
  const auto gap = tcost::solve_gap(kMarket, kPrefs);
  double y = 0.0;
  const double step = gap.y_max / 1024.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tcost::eval_w(gap, y));
    y = y + step > gap.y_max ? 0.0 : y + step;
  }
}
BENCHMARK(BM_EvalW);

void BM_EvalG(benchmark::State& state) {
  const auto gap = tcost::solve_gap(kMarket, kPrefs);
  double y = 0.0;
  const double step = gap.y_max / 1024.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tcost::eval_g(gap, y));
    y = y + step > gap.y_max ? 0.0 : y + step;
  }
}
BENCHMARK(BM_EvalG);

void BM_QTilde(benchmark::State& state) {
  const tcost::ShadowModel model(tcost::solve_gap(kMarket, kPrefs));
  double y = 0.0;
  const double step = model.y_max() / 1024.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.q_tilde(y));
    y = y + step > model.y_max() ? 0.0 : y + step;
  }
}
BENCHMARK(BM_QTilde);

void BM_NormalStream(benchmark::State& state) {
  tcost::NormalStream noise(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(noise.next());
}
BENCHMARK(BM_NormalStream);

// One path of 10^4 Euler steps; items processed are steps.
void BM_SimulatePath(benchmark::State& state) {
  const tcost::ShadowModel model(tcost::solve_gap(kMarket, kPrefs));
  tcost::SimConfig cfg;
  cfg.horizon_years = 1.0;
  cfg.dt_years = 1e-4;
  cfg.n_paths = 1;
  cfg.measure = state.range(0) == 0 ? tcost::Measure::Physical : tcost::Measure::RiskNeutral;
  cfg.track_shadow_wealth = state.range(0) == 2;
  if (state.range(0) == 2) cfg.measure = tcost::Measure::Physical;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tcost::simulate_reflected(model, cfg));
    ++cfg.seed;
  }
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_SimulatePath)->Arg(0)->Arg(1)->Arg(2);

void BM_OptimizeSpread(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(tcost::optimize_spread({0.08, 0.16}, kPrefs, {1.0}));
  }
}
BENCHMARK(BM_OptimizeSpread)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
