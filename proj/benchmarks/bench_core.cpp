#include <benchmark/benchmark.h>

#include <cmath>

#include "rrdps/optimizer.hpp"
#include "rrdps/security.hpp"
#include "rrdps/simulation.hpp"

namespace {

void BM_PoissonTail(benchmark::State& state) {
  double nu = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rrdps::poisson_tail(3.84, 12 + static_cast<int>(nu) % 4));
    nu += 1;
  }
}
BENCHMARK(BM_PoissonTail);

void BM_ChernoffDeviation(benchmark::State& state) {
  const double p = 1e-8;
  std::int64_t n = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rrdps::chernoff_deviation(p, 1 + n % 120, 1e-10));
    ++n;
  }
}
BENCHMARK(BM_ChernoffDeviation);

void BM_VacuumMinusBound(benchmark::State& state) {
  const double mu0 = 0.03;
  const rrdps::SourceSpec spec{
      .pulses_per_block = 128,
      .nu_th = 10,
      .e_src = 1e-6,
      .mode = rrdps::BoundedVacuum{rrdps::VacuumBounds{
          .p_u0 = std::exp(-mu0),
          .p_l0 = std::exp(-mu0),
          .p_u1 = std::exp(-0.99 * mu0),
          .p_l1 = std::exp(-1.01 * mu0)}}};
  double eps = 1e-12;
  for (auto _ : state) {
    // Cycles through ~60 epsilon values: the first pass builds deviation
    // tables, later passes measure the memoized path.
    eps = eps >= 1e-4 ? 1e-12 : eps * 1.37;
    benchmark::DoNotOptimize(rrdps::n_vac_upper(spec, eps));
  }
}
BENCHMARK(BM_VacuumMinusBound);

void BM_EvaluatePointBounded(benchmark::State& state) {
  rrdps::OptimizeConfig cfg = rrdps::OptimizeConfig::defaults(128);
  cfg.source_case = rrdps::CaseII{0.01};
  double mu = 0.01;
  for (auto _ : state) {
    mu = mu >= 0.1 ? 0.01 : mu * 1.07;
    benchmark::DoNotOptimize(rrdps::evaluate_point(50.0, mu, 12, 1e-9, cfg));
  }
}
BENCHMARK(BM_EvaluatePointBounded);

void BM_ModelBlocks(benchmark::State& state) {
  rrdps::SimConfig cfg;
  cfg.pulses_per_block = 128;
  cfg.mu0 = 1.0 / 128.0;
  cfg.mu1 = cfg.mu0;
  cfg.n_blocks = state.range(0);
  cfg.seed = 7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rrdps::run_blocks(cfg));
  }
  state.SetItemsProcessed(state.iterations() * cfg.n_blocks);
}
BENCHMARK(BM_ModelBlocks)->Arg(100000);

void BM_PulseBlocks(benchmark::State& state) {
  rrdps::SimConfig cfg;
  cfg.pulses_per_block = 128;
  cfg.mu0 = 1.0 / 128.0;
  cfg.mu1 = cfg.mu0;
  cfg.n_blocks = state.range(0);
  cfg.seed = 7;
  cfg.fidelity = rrdps::Fidelity::kPulseLevel;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rrdps::run_blocks(cfg));
  }
  state.SetItemsProcessed(state.iterations() * cfg.n_blocks);
}
BENCHMARK(BM_PulseBlocks)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
