#include "synve/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "mlp_kernels.hpp"
#include "random.hpp"
#include "synve/error.hpp"
#include "synve/eval_metrics.hpp"
#include "synve/fusion.hpp"

namespace synve {

namespace {

// Examples per gradient chunk. Chunks are reduced in index order, which pins
// the floating-point summation order independently of the thread count.
constexpr std::size_t kChunk = 32;

void fuse_row(const ResolvedPairs& pairs, std::size_t i, std::span<float> out) {
  const auto& store = *pairs.store;
  fuse_into(store.row(pairs.premise_rows[i]), store.row(pairs.hypothesis_rows[i]), out);
}

struct Evaluation {
  double loss = 0.0;
  std::vector<Label> predictions;
};

Evaluation evaluate_model(const MlpModel& model, const ResolvedPairs& pairs) {
  const auto p = detail::view(model);
  Evaluation out;
  out.predictions.resize(pairs.size());
  std::vector<double> losses(pairs.size());
#pragma omp parallel
  {
    detail::Workspace<float> ws(p);
    std::vector<float> x(model.d_in);
    std::vector<float> probs(model.d_out);
#pragma omp for schedule(static)
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      fuse_row(pairs, i, x);
      detail::forward_row(p, x.data(), ws);
      losses[i] = detail::softmax_xent<float>(ws.z2, label_index(pairs.labels[i]), probs);
      out.predictions[i] = model.label_order[detail::argmax<float>(ws.z2)];
    }
  }
  for (double l : losses) out.loss += l;
  out.loss /= static_cast<double>(pairs.size());
  return out;
}

double accuracy_of(std::span<const Label> gold, std::span<const Label> pred) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) correct += gold[i] == pred[i] ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(gold.size());
}

class Adam {
 public:
  Adam(const TrainConfig& config, std::size_t n_params)
      : config_(config), m_(n_params, 0.0f), v_(n_params, 0.0f) {}

  // Applies one step to params[offset .. offset + grad.size()).
  void step_block(std::span<float> params, std::span<const float> grad, std::size_t offset) {
    const auto b1 = static_cast<float>(config_.beta1);
    const auto b2 = static_cast<float>(config_.beta2);
    const auto step = static_cast<float>(config_.learning_rate / bias1_);
    const auto inv_sqrt_bias2 = static_cast<float>(1.0 / std::sqrt(bias2_));
    const auto eps = static_cast<float>(config_.adam_epsilon);
    float* m = m_.data() + offset;
    float* v = v_.data() + offset;
    for (std::size_t i = 0; i < params.size(); ++i) {
      m[i] = b1 * m[i] + (1.0f - b1) * grad[i];
      v[i] = b2 * v[i] + (1.0f - b2) * grad[i] * grad[i];
      params[i] -= step * m[i] / (std::sqrt(v[i]) * inv_sqrt_bias2 + eps);
    }
  }

  void next_step() {
    ++t_;
    bias1_ = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    bias2_ = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  }

 private:
  TrainConfig config_;
  std::vector<float> m_, v_;
  std::size_t t_ = 0;
  double bias1_ = 1.0, bias2_ = 1.0;
};

struct GradBuffer {
  std::vector<float> w1, b1, w2, b2;

  explicit GradBuffer(const MlpModel& m)
      : w1(m.w1.size()), b1(m.b1.size()), w2(m.w2.size()), b2(m.b2.size()) {}

  void zero() {
    for (auto* b : {&w1, &b1, &w2, &b2}) std::fill(b->begin(), b->end(), 0.0f);
  }
  void add(const GradBuffer& o) {
    auto add_block = [](std::vector<float>& a, const std::vector<float>& b) {
      for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    };
    add_block(w1, o.w1);
    add_block(b1, o.b1);
    add_block(w2, o.w2);
    add_block(b2, o.b2);
  }
  void scale(float s) {
    for (auto* b : {&w1, &b1, &w2, &b2})
      for (auto& x : *b) x *= s;
  }
  detail::GradView<float> view() { return {w1.data(), b1.data(), w2.data(), b2.data()}; }
};

void check_pairs(const ResolvedPairs& pairs, const char* what) {
  if (pairs.store == nullptr) throw InputError(fmt::format("{} set has no store", what));
  if (pairs.premise_rows.size() != pairs.size() || pairs.hypothesis_rows.size() != pairs.size()) {
    throw InputError(fmt::format("{} set is inconsistent", what));
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw InputError("epochs must be >= 1");
  if (batch_size < 1) throw InputError("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw InputError("learning_rate must be positive");
  if (hidden < 1) throw InputError("hidden size must be >= 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) throw InputError("Adam betas must lie in [0, 1)");
  if (!(adam_epsilon > 0.0)) throw InputError("adam_epsilon must be positive");
}

ResolvedPairs resolve_pairs(std::span<const PairExample> pairs, const EmbeddingStore& store) {
  ResolvedPairs out;
  out.store = &store;
  out.premise_rows.reserve(pairs.size());
  out.hypothesis_rows.reserve(pairs.size());
  out.labels.reserve(pairs.size());
  for (const auto& p : pairs) {
    auto prem = store.find(p.premise_id);
    auto hyp = store.find(p.hypothesis_id);
    if (!prem) throw InputError(fmt::format("pair references missing vector '{}'", p.premise_id));
    if (!hyp) throw InputError(fmt::format("pair references missing vector '{}'", p.hypothesis_id));
    out.premise_rows.push_back(*prem);
    out.hypothesis_rows.push_back(*hyp);
    out.labels.push_back(p.label);
  }
  return out;
}

TrainResult train(const ResolvedPairs& train_set, const ResolvedPairs& dev_set, const TrainConfig& config) {
  config.validate();
  check_pairs(train_set, "train");
  check_pairs(dev_set, "dev");
  if (train_set.empty()) throw InputError("empty training set");
  if (dev_set.empty()) throw InputError("empty dev set");
  if (train_set.store->dim() != dev_set.store->dim()) throw InputError("train and dev stores differ in dimension");

  const std::size_t d_in = 5 * static_cast<std::size_t>(train_set.store->dim());
  std::mt19937_64 rng(config.seed);
  MlpModel model = MlpModel::kaiming(d_in, config.hidden, rng(), config.activation);

  Adam adam(config, model.parameter_count());
  const std::size_t max_chunks = (config.batch_size + kChunk - 1) / kChunk;
  std::vector<GradBuffer> chunk_grads(max_chunks, GradBuffer(model));
  std::vector<std::vector<float>> chunk_inputs(max_chunks, std::vector<float>(kChunk * d_in));
  std::vector<std::vector<std::size_t>> chunk_targets(max_chunks, std::vector<std::size_t>(kChunk));

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  MlpModel best = model;
  double best_dev = -1.0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    detail::shuffle<std::size_t>(order, rng);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t batch = std::min(config.batch_size, order.size() - start);
      const std::size_t n_chunks = (batch + kChunk - 1) / kChunk;
      const auto p = detail::view(model);

#pragma omp parallel
      {
        detail::Workspace<float> ws(p);
#pragma omp for schedule(static)
        for (std::size_t c = 0; c < n_chunks; ++c) {
          const std::size_t c_begin = c * kChunk;
          const std::size_t c_size = std::min(kChunk, batch - c_begin);
          auto& x = chunk_inputs[c];
          auto& y = chunk_targets[c];
          for (std::size_t r = 0; r < c_size; ++r) {
            const std::size_t ex = order[start + c_begin + r];
            fuse_row(train_set, ex, std::span<float>(x).subspan(r * d_in, d_in));
            y[r] = label_index(train_set.labels[ex]);
          }
          chunk_grads[c].zero();
          detail::accumulate_gradients<float>(p, x.data(), y.data(), c_size, chunk_grads[c].view(), ws);
        }
      }

      for (std::size_t c = 1; c < n_chunks; ++c) chunk_grads[0].add(chunk_grads[c]);
      auto& g = chunk_grads[0];
      g.scale(1.0f / static_cast<float>(batch));

      adam.next_step();
      std::size_t offset = 0;
      adam.step_block(model.w1, g.w1, offset);
      offset += model.w1.size();
      adam.step_block(model.b1, g.b1, offset);
      offset += model.b1.size();
      adam.step_block(model.w2, g.w2, offset);
      offset += model.w2.size();
      adam.step_block(model.b2, g.b2, offset);
    }

    const auto train_eval = evaluate_model(model, train_set);
    const auto dev_eval = evaluate_model(model, dev_set);
    EpochRecord rec;
    rec.train_loss = train_eval.loss;
    rec.train_accuracy = accuracy_of(train_set.labels, train_eval.predictions);
    rec.dev_accuracy = accuracy_of(dev_set.labels, dev_eval.predictions);
    rec.dev_macro_f1 = evaluate(dev_set.labels, dev_eval.predictions).macro_f1;
    result.history.epochs.push_back(rec);
    if (rec.dev_accuracy > best_dev) {
      best_dev = rec.dev_accuracy;
      best = model;
      result.history.best_epoch = epoch;
    }
  }
  for (float w : best.w1) {
    if (!std::isfinite(w)) throw std::runtime_error("training diverged: non-finite weights");
  }
  result.model = std::move(best);
  return result;
}

std::vector<Label> predict_all(const MlpModel& model, const ResolvedPairs& pairs) {
  model.validate();
  check_pairs(pairs, "prediction");
  if (5 * static_cast<std::size_t>(pairs.store->dim()) != model.d_in) {
    throw InputError(
        fmt::format("store dimension {} does not match model input {}", pairs.store->dim(), model.d_in));
  }
  const auto p = detail::view(model);
  std::vector<Label> out(pairs.size());
#pragma omp parallel
  {
    detail::Workspace<float> ws(p);
    std::vector<float> x(model.d_in);
#pragma omp for schedule(static)
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      fuse_row(pairs, i, x);
      detail::forward_row(p, x.data(), ws);
      out[i] = model.label_order[detail::argmax<float>(ws.z2)];
    }
  }
  return out;
}

}  // namespace synve
