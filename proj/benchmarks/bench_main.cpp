#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "synve/embedding_store.hpp"
#include "synve/similarity.hpp"
#include "synve/trainer.hpp"

namespace {

synve::EmbeddingStore random_store(std::size_t n, std::uint32_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g;
  std::vector<std::string> ids(n);
  std::vector<float> values(n * dim);
  for (std::size_t i = 0; i < n; ++i) ids[i] = "v" + std::to_string(i);
  for (auto& v : values) v = g(rng);
  return synve::EmbeddingStore(dim, std::move(ids), std::move(values));
}

synve::RowSet range(const synve::EmbeddingStore& s, std::size_t begin, std::size_t end) {
  synve::RowSet r{&s, {}};
  for (std::size_t i = begin; i < end; ++i) r.rows.push_back(i);
  return r;
}

void BM_TopKBatch(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto store = random_store(n + 256, 512, 1);
  const auto queries = range(store, 0, 256);
  const auto corpus = range(store, 256, n + 256);
  for (auto _ : state) benchmark::DoNotOptimize(synve::top_k_batch(queries, corpus, 100));
  state.SetItemsProcessed(state.iterations() * 256 * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_TopKBatch)->Arg(5000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_PairwiseStats(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto store = random_store(2 * n, 512, 2);
  const auto queries = range(store, 0, n);
  const auto corpus = range(store, n, 2 * n);
  for (auto _ : state) benchmark::DoNotOptimize(synve::pairwise_stats(queries, corpus, 40));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_PairwiseStats)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_TrainEpoch(benchmark::State& state) {
  const std::size_t n = 4096, dim = 512;
  const auto store = random_store(2 * n, dim, 3);
  synve::ResolvedPairs train{&store, {}, {}, {}};
  std::mt19937_64 rng(4);
  for (std::size_t i = 0; i < n; ++i) {
    train.premise_rows.push_back(i);
    train.hypothesis_rows.push_back(n + i);
    train.labels.push_back(synve::kLabelOrder[rng() % 3]);
  }
  synve::ResolvedPairs dev = train;
  dev.premise_rows.resize(256);
  dev.hypothesis_rows.resize(256);
  dev.labels.resize(256);
  synve::TrainConfig cfg;
  cfg.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(synve::train(train, dev, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
