#include <benchmark/benchmark.h>

#include "ipwvar/mc_harness.hpp"
#include "ipwvar/scenario_registry.hpp"

namespace {

using namespace ipwvar;

struct Fixture {
  ScenarioSpec spec;
  AnalysisDataset data;
  ResponseFit rfit;
  AssociationFit afit;

  explicit Fixture(int n) : spec(find_scenario("MNAR6", scenario_registry())) {
    spec.n = n;
    data = to_analysis_dataset(generate_cohort(spec, default_generative_model(), 1), spec);
    rfit = fit_response(data);
    afit = fit_weighted_linear(data, rfit.p_hat);
  }
};

void BM_FitResponse(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_response(f.data));
}
BENCHMARK(BM_FitResponse)->Arg(1000)->Arg(10000);

void BM_FitWeightedLinear(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_weighted_linear(f.data, f.rfit.p_hat));
}
BENCHMARK(BM_FitWeightedLinear)->Arg(1000)->Arg(10000);

void BM_RobustVariance(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(robust_variance(f.afit, f.rfit, f.data));
}
BENCHMARK(BM_RobustVariance)->Arg(1000)->Arg(10000);

void BM_LinearizedVariance(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(linearized_variance(f.afit, f.rfit, f.data));
}
BENCHMARK(BM_LinearizedVariance)->Arg(1000)->Arg(10000);

void BM_RunReplicate(benchmark::State& state) {
  const ScenarioSpec spec = find_scenario("MNAR6", scenario_registry());
  const GenerativeModel model = default_generative_model();
  std::int64_t rep = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_replicate(spec, model, rep++, 2024));
}
BENCHMARK(BM_RunReplicate);

}  // namespace
BENCHMARK_MAIN();
