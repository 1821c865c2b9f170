#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "synve/embedding_store.hpp"
#include "synve/labels.hpp"

namespace synve {

enum class Activation : std::uint32_t { relu = 0, identity = 1, tanh = 2 };

std::string_view to_string(Activation activation);
std::optional<Activation> parse_activation(std::string_view text);

// One-hidden-layer perceptron: probs = softmax(act(x W1 + b1) W2 + b2).
// Weight matrices are row-major with shapes d_in x d_hidden and
// d_hidden x d_out.
struct MlpModel {
  std::size_t d_in = 0;
  std::size_t d_hidden = 0;
  std::size_t d_out = 0;
  Activation activation = Activation::relu;
  std::vector<Label> label_order;
  std::vector<float> w1, b1, w2, b2;

  // All-zero parameters with the canonical label order.
  static MlpModel zeros(std::size_t d_in, std::size_t d_hidden, Activation activation = Activation::relu);
  // Seeded Kaiming-style uniform init scaled by fan-in; zero biases.
  static MlpModel kaiming(std::size_t d_in, std::size_t d_hidden, std::uint64_t seed,
                          Activation activation = Activation::relu);

  std::size_t parameter_count() const { return w1.size() + b1.size() + w2.size() + b2.size(); }
  // Throws InputError on inconsistent shapes, non-finite weights, or a label
  // order that does not match d_out.
  void validate() const;

  friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

std::vector<float> logits(const MlpModel& model, std::span<const float> x);
// Softmax probabilities in label_order; computed in double.
std::vector<double> forward(const MlpModel& model, std::span<const float> x);
// Argmax of the logits, ties resolved toward the earlier label_order position.
Label predict_label(const MlpModel& model, std::span<const float> x);
// Fuses the premise and hypothesis rows on the fly before classifying.
Label predict(const MlpModel& model, const std::string& premise_id, const std::string& hypothesis_id,
              const EmbeddingStore& store);

// Gradients of the mean softmax cross-entropy over a batch, in double.
struct MlpGradients {
  double loss = 0.0;
  std::vector<double> w1, b1, w2, b2;
};

// `inputs` is batch x d_in row-major; `targets` holds label_order indices.
MlpGradients loss_and_gradients(const MlpModel& model, std::span<const float> inputs,
                                std::span<const std::size_t> targets);
double batch_loss(const MlpModel& model, std::span<const float> inputs, std::span<const std::size_t> targets);

// Max relative error between backprop gradients and central differences of
// step `epsilon` over every parameter. Both sides are evaluated in double
// around the model's float weights. Parameters whose analytic and numeric
// gradients are both below 1e-8 in magnitude are treated as zero and skipped.
double gradient_check(const MlpModel& model, std::span<const float> inputs,
                      std::span<const std::size_t> targets, double epsilon);

// Checkpoint layout (little-endian):
//   "VEMP" | u32 version (=1) | u32 d_in | u32 d_hidden | u32 d_out
//   | u32 activation | d_out x (u16 length + label name)
//   | W1 | b1 | W2 | b2 as float32
inline constexpr char kModelMagic[4] = {'V', 'E', 'M', 'P'};
inline constexpr std::uint32_t kModelVersion = 1;

std::vector<char> encode_model(const MlpModel& model);
MlpModel decode_model(std::span<const char> bytes);
void save_model(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_model(const std::filesystem::path& path);

}  // namespace synve
