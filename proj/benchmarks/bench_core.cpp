#include <benchmark/benchmark.h>

#include <vector>

#include "lfp/bayes_risk.hpp"
#include "lfp/channel.hpp"
#include "lfp/detail/rng.hpp"
#include "lfp/gradient.hpp"
#include "lfp/normal.hpp"
#include "lfp/projection.hpp"
#include "lfp/solver.hpp"

namespace {

lfp::DiscreteDistribution random_prior(int d, double lo, double hi,
                                       std::uint64_t seed) {
  lfp::detail::SplitMix64 rng(seed);
  lfp::DiscreteDistribution dist;
  double total = 0.0;
  for (int i = 0; i < d; ++i) {
    dist.points.push_back({rng.uniform(lo, hi)});
    dist.masses.push_back(0.05 + rng.uniform());
    total += dist.masses.back();
  }
  for (double& p : dist.masses) p /= total;
  return dist;
}

void BM_NormalCdf(benchmark::State& state) {
  double z = -8.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lfp::normal_cdf(z));
    z += 1e-4;
    if (z > 8.0) z = -8.0;
  }
}
BENCHMARK(BM_NormalCdf);

void BM_ProjectSimplex(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  lfp::detail::SplitMix64 rng(1);
  std::vector<double> v(d);
  for (double& x : v) x = rng.uniform(-2.0, 2.0);
  std::vector<double> work(d);
  for (auto _ : state) {
    work = v;
    lfp::project_simplex_inplace(work);
    benchmark::DoNotOptimize(work.data());
  }
  state.SetItemsProcessed(state.iterations() * d);
}
BENCHMARK(BM_ProjectSimplex)->Range(8, 4096);

void BM_BayesRiskBinomial(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto ch = lfp::binomial_channel(m);
  const auto loss = lfp::squared_error_loss(1);
  const auto dist = random_prior(2 * (m + 1), 0.0, 1.0, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lfp::bayes_risk(dist, ch, loss));
  }
}
BENCHMARK(BM_BayesRiskBinomial)->Arg(1)->Arg(4)->Arg(10);

void BM_BayesRiskQuantizedGaussian(benchmark::State& state) {
  const int levels = static_cast<int>(state.range(0));
  const auto ch = lfp::quantized_gaussian_channel(levels);
  const auto loss = lfp::squared_error_loss(1);
  const auto dist = random_prior(2 * levels + 1, -5.0, 5.0, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lfp::bayes_risk(dist, ch, loss));
  }
}
BENCHMARK(BM_BayesRiskQuantizedGaussian)->Arg(1)->Arg(4);

void BM_AnalyticGradient(benchmark::State& state) {
  const auto ch = lfp::quantized_gaussian_channel(static_cast<int>(state.range(0)));
  const auto dist = random_prior(2 * static_cast<int>(state.range(0)) + 1,
                                 -5.0, 5.0, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lfp::analytic_gradient_sq(dist, ch));
  }
}
BENCHMARK(BM_AnalyticGradient)->Arg(1)->Arg(4);

void BM_FiniteDifferenceGradient(benchmark::State& state) {
  const auto ch = lfp::binomial_channel(4);
  const auto loss = lfp::squared_error_loss(1);
  const auto dist = random_prior(static_cast<int>(state.range(0)), 0.0, 1.0, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lfp::fd_gradient(dist, ch, loss));
  }
}
BENCHMARK(BM_FiniteDifferenceGradient)->Arg(4)->Arg(12);

void BM_SolveBinomialM1(benchmark::State& state) {
  const lfp::ProblemSpec spec{lfp::binomial_channel(1),
                              lfp::squared_error_loss(1),
                              lfp::SupportSet::box({0.0}, {1.0}),
                              {}};
  lfp::SolverConfig cfg;
  cfg.restarts = 1;
  cfg.max_iter = 5000;
  cfg.record_trace = false;
  for (auto _ : state) {
    cfg.seed += 1;
    benchmark::DoNotOptimize(lfp::solve(spec, cfg));
  }
}
BENCHMARK(BM_SolveBinomialM1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
