#include "synve/mlp.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

#include "binary_io.hpp"
#include "mlp_kernels.hpp"
#include "random.hpp"
#include "synve/error.hpp"
#include "synve/fusion.hpp"

namespace synve {

std::string_view to_string(Activation activation) {
  switch (activation) {
    case Activation::relu:
      return "relu";
    case Activation::identity:
      return "identity";
    case Activation::tanh:
      return "tanh";
  }
  return "unknown";
}

std::optional<Activation> parse_activation(std::string_view text) {
  for (Activation a : {Activation::relu, Activation::identity, Activation::tanh}) {
    if (to_string(a) == text) return a;
  }
  return std::nullopt;
}

MlpModel MlpModel::zeros(std::size_t d_in, std::size_t d_hidden, Activation activation) {
  MlpModel m;
  m.d_in = d_in;
  m.d_hidden = d_hidden;
  m.d_out = kNumLabels;
  m.activation = activation;
  m.label_order = canonical_label_order();
  m.w1.assign(d_in * d_hidden, 0.0f);
  m.b1.assign(d_hidden, 0.0f);
  m.w2.assign(d_hidden * m.d_out, 0.0f);
  m.b2.assign(m.d_out, 0.0f);
  return m;
}

MlpModel MlpModel::kaiming(std::size_t d_in, std::size_t d_hidden, std::uint64_t seed, Activation activation) {
  auto m = zeros(d_in, d_hidden, activation);
  std::mt19937_64 rng(seed);
  // He-uniform bound for the hidden layer, unit-gain bound for the output.
  const double hidden_bound = std::sqrt(6.0 / static_cast<double>(d_in));
  const double output_bound = std::sqrt(3.0 / static_cast<double>(d_hidden));
  for (auto& w : m.w1) w = static_cast<float>((2.0 * detail::uniform_real(rng) - 1.0) * hidden_bound);
  for (auto& w : m.w2) w = static_cast<float>((2.0 * detail::uniform_real(rng) - 1.0) * output_bound);
  return m;
}

void MlpModel::validate() const {
  if (d_in == 0 || d_hidden == 0 || d_out == 0) throw InputError("model dimensions must be positive");
  if (w1.size() != d_in * d_hidden || b1.size() != d_hidden || w2.size() != d_hidden * d_out ||
      b2.size() != d_out) {
    throw InputError("model weight shapes are inconsistent with its dimensions");
  }
  if (label_order.size() != d_out) {
    throw InputError(fmt::format("model has d_out={} but {} labels", d_out, label_order.size()));
  }
  if (label_order != canonical_label_order()) {
    throw InputError("model label order must be entailment, neutral, contradiction");
  }
  for (const auto* block : {&w1, &b1, &w2, &b2}) {
    for (float w : *block) {
      if (!std::isfinite(w)) throw InputError("model has non-finite weights");
    }
  }
}

std::vector<float> logits(const MlpModel& model, std::span<const float> x) {
  if (x.size() != model.d_in) {
    throw InputError(fmt::format("input has {} features, model expects {}", x.size(), model.d_in));
  }
  const auto p = detail::view(model);
  detail::Workspace<float> ws(p);
  detail::forward_row(p, x.data(), ws);
  return ws.z2;
}

std::vector<double> forward(const MlpModel& model, std::span<const float> x) {
  const auto z = logits(model, x);
  std::vector<double> probs(z.size());
  const double m = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (std::size_t o = 0; o < z.size(); ++o) {
    probs[o] = std::exp(static_cast<double>(z[o]) - m);
    sum += probs[o];
  }
  for (auto& q : probs) q /= sum;
  return probs;
}

Label predict_label(const MlpModel& model, std::span<const float> x) {
  const auto z = logits(model, x);
  return model.label_order[detail::argmax<float>(z)];
}

Label predict(const MlpModel& model, const std::string& premise_id, const std::string& hypothesis_id,
              const EmbeddingStore& store) {
  const auto p = store.row(store.row_of(premise_id));
  const auto h = store.row(store.row_of(hypothesis_id));
  if (5 * static_cast<std::size_t>(store.dim()) != model.d_in) {
    throw InputError(fmt::format("store dimension {} does not match model input {}", store.dim(), model.d_in));
  }
  return predict_label(model, fuse(p, h));
}

namespace {

struct DoubleParams {
  std::vector<double> w1, b1, w2, b2;

  explicit DoubleParams(const MlpModel& m)
      : w1(m.w1.begin(), m.w1.end()), b1(m.b1.begin(), m.b1.end()), w2(m.w2.begin(), m.w2.end()),
        b2(m.b2.begin(), m.b2.end()) {}

  detail::ParamView<double> view(const MlpModel& m) const {
    return {m.d_in, m.d_hidden, m.d_out, m.activation, w1.data(), b1.data(), w2.data(), b2.data()};
  }
};

std::size_t check_batch(const MlpModel& model, std::span<const float> inputs, std::span<const std::size_t> targets) {
  model.validate();
  if (targets.empty()) throw InputError("empty batch");
  if (inputs.size() != targets.size() * model.d_in) {
    throw InputError(fmt::format("batch has {} values for {} rows of width {}", inputs.size(), targets.size(),
                                 model.d_in));
  }
  for (auto t : targets) {
    if (t >= model.d_out) throw InputError(fmt::format("target index {} out of range", t));
  }
  return targets.size();
}

}  // namespace

MlpGradients loss_and_gradients(const MlpModel& model, std::span<const float> inputs,
                                std::span<const std::size_t> targets) {
  const std::size_t n = check_batch(model, inputs, targets);
  DoubleParams params(model);
  const auto p = params.view(model);
  MlpGradients g;
  g.w1.assign(model.w1.size(), 0.0);
  g.b1.assign(model.b1.size(), 0.0);
  g.w2.assign(model.w2.size(), 0.0);
  g.b2.assign(model.b2.size(), 0.0);
  detail::Workspace<double> ws(p);
  const double total = detail::accumulate_gradients<double>(p, inputs.data(), targets.data(), n,
                                                            {g.w1.data(), g.b1.data(), g.w2.data(), g.b2.data()}, ws);
  const double scale = 1.0 / static_cast<double>(n);
  g.loss = total * scale;
  for (auto* block : {&g.w1, &g.b1, &g.w2, &g.b2}) {
    for (auto& v : *block) v *= scale;
  }
  return g;
}

double batch_loss(const MlpModel& model, std::span<const float> inputs, std::span<const std::size_t> targets) {
  const std::size_t n = check_batch(model, inputs, targets);
  DoubleParams params(model);
  const auto p = params.view(model);
  detail::Workspace<double> ws(p);
  return detail::summed_loss<double>(p, inputs.data(), targets.data(), n, ws) / static_cast<double>(n);
}

double gradient_check(const MlpModel& model, std::span<const float> inputs, std::span<const std::size_t> targets,
                      double epsilon) {
  const auto analytic = loss_and_gradients(model, inputs, targets);
  const std::size_t n = targets.size();
  DoubleParams params(model);
  detail::Workspace<double> ws(params.view(model));
  auto mean_loss = [&] {
    return detail::summed_loss<double>(params.view(model), inputs.data(), targets.data(), n, ws) /
           static_cast<double>(n);
  };

  double worst = 0.0;
  auto compare = [&](std::vector<double>& block, const std::vector<double>& grad) {
    for (std::size_t i = 0; i < block.size(); ++i) {
      const double saved = block[i];
      block[i] = saved + epsilon;
      const double up = mean_loss();
      block[i] = saved - epsilon;
      const double down = mean_loss();
      block[i] = saved;
      const double numeric = (up - down) / (2.0 * epsilon);
      const double diff = std::abs(numeric - grad[i]);
      const double scale = std::max(std::abs(numeric), std::abs(grad[i]));
      if (scale <= 1e-8) continue;
      worst = std::max(worst, diff / scale);
    }
  };
  compare(params.w1, analytic.w1);
  compare(params.b1, analytic.b1);
  compare(params.w2, analytic.w2);
  compare(params.b2, analytic.b2);
  return worst;
}

std::vector<char> encode_model(const MlpModel& model) {
  model.validate();
  detail::ByteWriter w;
  w.put_raw({kModelMagic, 4});
  w.put(kModelVersion);
  w.put(static_cast<std::uint32_t>(model.d_in));
  w.put(static_cast<std::uint32_t>(model.d_hidden));
  w.put(static_cast<std::uint32_t>(model.d_out));
  w.put(static_cast<std::uint32_t>(model.activation));
  for (Label l : model.label_order) w.put_short_string(to_string(l));
  w.put_array<float>(model.w1);
  w.put_array<float>(model.b1);
  w.put_array<float>(model.w2);
  w.put_array<float>(model.b2);
  return std::move(w.bytes());
}

MlpModel decode_model(std::span<const char> bytes) {
  detail::ByteReader r(bytes);
  if (r.get_raw(4, "magic") != std::string_view(kModelMagic, 4)) throw InputError("bad magic: not a VEMP checkpoint");
  const auto version = r.get<std::uint32_t>("version");
  if (version != kModelVersion) throw InputError(fmt::format("unsupported checkpoint version {}", version));
  MlpModel m;
  m.d_in = r.get<std::uint32_t>("d_in");
  m.d_hidden = r.get<std::uint32_t>("d_hidden");
  m.d_out = r.get<std::uint32_t>("d_out");
  if (m.d_out != kNumLabels) {
    throw InputError(fmt::format("checkpoint has d_out={}, expected {}", m.d_out, kNumLabels));
  }
  const auto act = r.get<std::uint32_t>("activation");
  if (act > static_cast<std::uint32_t>(Activation::tanh)) throw InputError(fmt::format("unknown activation tag {}", act));
  m.activation = static_cast<Activation>(act);
  for (std::size_t o = 0; o < m.d_out; ++o) {
    const auto name = r.get_short_string("label order");
    auto label = parse_label(name);
    if (!label) throw InputError(fmt::format("unknown label '{}' in checkpoint", name));
    m.label_order.push_back(*label);
  }
  const std::size_t n_params = m.d_in * m.d_hidden + m.d_hidden + m.d_hidden * m.d_out + m.d_out;
  if (r.remaining() != n_params * sizeof(float)) {
    throw InputError(fmt::format("checkpoint payload has {} bytes, shape needs {}", r.remaining(),
                                 n_params * sizeof(float)));
  }
  m.w1.resize(m.d_in * m.d_hidden);
  m.b1.resize(m.d_hidden);
  m.w2.resize(m.d_hidden * m.d_out);
  m.b2.resize(m.d_out);
  r.get_array<float>(m.w1, "W1");
  r.get_array<float>(m.b1, "b1");
  r.get_array<float>(m.w2, "W2");
  r.get_array<float>(m.b2, "b2");
  m.validate();
  return m;
}

void save_model(const MlpModel& model, const std::filesystem::path& path) {
  detail::write_file_bytes(path, encode_model(model));
}

MlpModel load_model(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  try {
    return decode_model(bytes);
  } catch (const InputError& e) {
    throw InputError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace synve
