#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "imbgan/classifiers.hpp"
#include "imbgan/gan.hpp"
#include "imbgan/metrics.hpp"
#include "imbgan/nn.hpp"

namespace {

using namespace imbgan;

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(rows, cols);
  for (double& v : m.values()) v = u(rng);
  return m;
}

data::Dataset random_dataset(std::size_t rows, std::size_t cols, double positive_rate,
                             std::uint64_t seed) {
  Matrix x = random_matrix(rows, cols, seed);
  Rng rng(seed + 1);
  std::bernoulli_distribution coin(positive_rate);
  std::vector<int> y(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = coin(rng) ? 1 : 0;
    if (y[r] == 1) x(r, 0) += 0.5;
  }
  y[0] = 1;
  y[1] = 0;
  return data::make_dataset(std::move(x), std::move(y));
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = random_matrix(n, n, 1);
  const Matrix b = random_matrix(n, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(64)->Arg(128)->Arg(256);

void BM_GanEpochs(benchmark::State& state) {
  auto p = random_dataset(315, 30, 1.0, 3);
  p.labels.assign(p.size(), 1);
  gan::GanTrainConfig c;
  c.epochs = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gan::train_gan(p, c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GanEpochs)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_MlpEpoch(benchmark::State& state) {
  const auto d = random_dataset(static_cast<std::size_t>(state.range(0)), 30, 0.5, 4);
  auto c = classifiers::TrainConfig::mlp_defaults();
  c.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(classifiers::train_mlp(d, c));
}
BENCHMARK(BM_MlpEpoch)->Arg(19370)->Unit(benchmark::kMillisecond);

void BM_TreeFit(benchmark::State& state) {
  const auto d = random_dataset(static_cast<std::size_t>(state.range(0)), 30, 0.1, 5);
  const auto c = classifiers::TrainConfig::tree_defaults();
  for (auto _ : state) benchmark::DoNotOptimize(classifiers::train_tree(d, c));
}
BENCHMARK(BM_TreeFit)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_RocAuc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> scores(n);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = u(rng);
    labels[i] = i % 30 == 0 ? 1 : 0;
  }
  for (auto _ : state) benchmark::DoNotOptimize(metrics::roc_auc(labels, scores));
}
BENCHMARK(BM_RocAuc)->Arg(5000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
