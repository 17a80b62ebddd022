#include <benchmark/benchmark.h>

#include <numeric>

#include <blockfi/estimation.hpp>
#include <blockfi/fragility.hpp>
#include <blockfi/models.hpp>

using namespace blockfi;

namespace {

// One variable per block so the block count s equals the dimension.
void BM_ExceedanceDistribution(benchmark::State& state) {
  const auto s = static_cast<std::size_t>(state.range(0));
  const MevModel model = LogisticModel(s, 0.5);
  const auto partition = Partition::singletons(s);
  const auto eps = ExtremalCoefficientSet::from_model(model, partition);
  for (auto _ : state) benchmark::DoNotOptimize(exceedance_distribution(eps, partition));
  state.SetComplexityN(static_cast<std::int64_t>(s) << s);
}
BENCHMARK(BM_ExceedanceDistribution)->DenseRange(4, 16, 4)->Complexity(benchmark::oN);

void BM_CoefficientTable(benchmark::State& state) {
  const auto s = static_cast<std::size_t>(state.range(0));
  const MevModel model = LogisticModel(s, 0.5);
  const auto partition = Partition::singletons(s);
  for (auto _ : state) benchmark::DoNotOptimize(ExtremalCoefficientSet::from_model(model, partition));
}
BENCHMARK(BM_CoefficientTable)->DenseRange(4, 12, 4);

void BM_Sample(benchmark::State& state) {
  Eigen::MatrixXd beta(2, 6);
  beta << 0.5, 0.5, 0.5, 0.0, 0.3, 0.3, 0.5, 0.5, 0.5, 1.0, 0.7, 0.7;
  const MevModel models[] = {LogisticModel(6, 0.5), AsymmetricLogisticModel(beta, {0.4, 0.7}),
                             GaussianModel(Eigen::MatrixXd::Identity(6, 6))};
  const auto& model = models[state.range(0)];
  const auto n = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(sample(model, n, 1));
  state.SetLabel(family_name(model));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_Sample)->ArgsProduct({{0, 1, 2}, {10000, 100000}});

void BM_PitTransform(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto data = sample(LogisticModel(9, 0.5), n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(pit_transform(data));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * 9));
}
BENCHMARK(BM_PitTransform)->Arg(1000)->Arg(100000);

void BM_FiHat(benchmark::State& state) {
  const auto pit = pit_transform(sample(LogisticModel(9, 0.5), 100000, 3));
  const auto partition = Partition::from_members(9, {{1, 2, 3, 4}, {5, 6, 7}, {8, 9}});
  for (auto _ : state) benchmark::DoNotOptimize(fi_hat(pit, partition));
}
BENCHMARK(BM_FiHat);

}  // namespace
BENCHMARK_MAIN();
