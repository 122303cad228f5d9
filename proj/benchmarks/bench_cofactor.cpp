#include <benchmark/benchmark.h>

#include "factlearn/cofactor.hpp"
#include "factlearn/gd.hpp"
#include "factlearn/oracle.hpp"
#include "factlearn/synthetic.hpp"

using namespace factlearn;

namespace {

SyntheticData star(std::int64_t fact_rows, std::int64_t fanout) {
  GenParams params;
  params.schema = SchemaKind::StarK;
  params.rows_per_relation = static_cast<std::size_t>(fact_rows);
  params.fanout = static_cast<std::size_t>(fanout);
  params.dimensions = 2;
  params.seed = 7;
  return gen_synthetic(params);
}

void BM_FactorizedCofactors(benchmark::State& state) {
  const SyntheticData data = star(state.range(0), state.range(1));
  for (auto _ : state) {
    FactorizedResult result = evaluate(data.order, data.db);
    benchmark::DoNotOptimize(extract_cofactor_matrix(result, data.features));
  }
}
BENCHMARK(BM_FactorizedCofactors)->Args({500, 1})->Args({500, 8})->Args({2000, 8})->Unit(benchmark::kMillisecond);

void BM_JoinAndBruteCofactors(benchmark::State& state) {
  const SyntheticData data = star(state.range(0), state.range(1));
  for (auto _ : state) {
    const Relation join = materialize_join(data.db, data.order);
    benchmark::DoNotOptimize(brute_cofactors(join, data.features));
  }
}
BENCHMARK(BM_JoinAndBruteCofactors)->Args({500, 1})->Args({500, 8})->Args({2000, 8})->Unit(benchmark::kMillisecond);

void BM_GradientCofactor(benchmark::State& state) {
  const SyntheticData data = star(state.range(0), state.range(1));
  const CofactorMatrix cofactors = extract_cofactor_matrix(evaluate(data.order, data.db), data.features);
  const Theta theta(data.features.size(), 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cofactor_gradient(cofactors, theta));
  }
}
BENCHMARK(BM_GradientCofactor)->Args({2000, 8});

void BM_GradientMaterialized(benchmark::State& state) {
  const SyntheticData data = star(state.range(0), state.range(1));
  const Relation join = materialize_join(data.db, data.order);
  const Theta theta(data.features.size(), 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(materialized_gradient(join, data.features, theta));
  }
}
BENCHMARK(BM_GradientMaterialized)->Args({2000, 8})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
