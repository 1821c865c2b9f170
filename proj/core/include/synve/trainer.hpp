#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "synve/embedding_store.hpp"
#include "synve/manifest.hpp"
#include "synve/mlp.hpp"

namespace synve {

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 256;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;
  std::size_t hidden = 250;
  Activation activation = Activation::relu;

  void validate() const;
};

// Pair ids resolved to store rows.
struct ResolvedPairs {
  const EmbeddingStore* store = nullptr;
  std::vector<std::size_t> premise_rows;
  std::vector<std::size_t> hypothesis_rows;
  std::vector<Label> labels;

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
};

// Throws InputError when an id has no vector in `store`.
ResolvedPairs resolve_pairs(std::span<const PairExample> pairs, const EmbeddingStore& store);

struct EpochRecord {
  double train_loss = 0.0;  // mean cross-entropy over the train set after the epoch
  double train_accuracy = 0.0;
  double dev_accuracy = 0.0;
  double dev_macro_f1 = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;  // 0-based; highest dev accuracy, earliest on ties

  friend bool operator==(const TrainHistory&, const TrainHistory&) = default;
};

struct TrainResult {
  MlpModel model;  // weights at best_epoch
  TrainHistory history;
};

// Minibatch Adam on softmax cross-entropy over fused premise/hypothesis
// vectors. Gradients are reduced over fixed-size chunks in chunk order, so a
// given seed yields the same history for any thread count.
TrainResult train(const ResolvedPairs& train_set, const ResolvedPairs& dev_set, const TrainConfig& config);

std::vector<Label> predict_all(const MlpModel& model, const ResolvedPairs& pairs);

}  // namespace synve
