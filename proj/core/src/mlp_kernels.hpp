#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "synve/mlp.hpp"

namespace synve::detail {

template <typename T>
struct ParamView {
  std::size_t d_in = 0, d_hidden = 0, d_out = 0;
  Activation activation = Activation::relu;
  const T* w1 = nullptr;
  const T* b1 = nullptr;
  const T* w2 = nullptr;
  const T* b2 = nullptr;
};

template <typename T>
struct GradView {
  T* w1 = nullptr;
  T* b1 = nullptr;
  T* w2 = nullptr;
  T* b2 = nullptr;
};

template <typename T>
inline T activate(T z, Activation a) {
  switch (a) {
    case Activation::relu:
      return z > T(0) ? z : T(0);
    case Activation::identity:
      return z;
    case Activation::tanh:
      return std::tanh(z);
  }
  return z;
}

// Derivative given the pre-activation z and activation output h.
template <typename T>
inline T activate_grad(T z, T h, Activation a) {
  switch (a) {
    case Activation::relu:
      return z > T(0) ? T(1) : T(0);
    case Activation::identity:
      return T(1);
    case Activation::tanh:
      return T(1) - h * h;
  }
  return T(1);
}

// Per-example scratch space.
template <typename T>
struct Workspace {
  std::vector<T> z1, h, z2, dz2, dz1;

  explicit Workspace(const ParamView<T>& p) : z1(p.d_hidden), h(p.d_hidden), z2(p.d_out), dz2(p.d_out), dz1(p.d_hidden) {}
};

// Hidden activations and logits for one input row; logits land in ws.z2.
template <typename T>
void forward_row(const ParamView<T>& p, const float* x, Workspace<T>& ws) {
  const std::size_t H = p.d_hidden, O = p.d_out;
  std::copy(p.b1, p.b1 + H, ws.z1.begin());
  for (std::size_t i = 0; i < p.d_in; ++i) {
    const T xi = static_cast<T>(x[i]);
    if (xi == T(0)) continue;
    const T* w = p.w1 + i * H;
    T* z = ws.z1.data();
    for (std::size_t j = 0; j < H; ++j) z[j] += xi * w[j];
  }
  for (std::size_t j = 0; j < H; ++j) ws.h[j] = activate(ws.z1[j], p.activation);
  std::copy(p.b2, p.b2 + O, ws.z2.begin());
  for (std::size_t j = 0; j < H; ++j) {
    const T hj = ws.h[j];
    const T* w = p.w2 + j * O;
    for (std::size_t o = 0; o < O; ++o) ws.z2[o] += hj * w[o];
  }
}

// Cross-entropy of logits against `target`; writes softmax(logits) into probs.
template <typename T>
T softmax_xent(std::span<const T> logits, std::size_t target, std::span<T> probs) {
  const T m = *std::max_element(logits.begin(), logits.end());
  T sum = 0;
  for (std::size_t o = 0; o < logits.size(); ++o) {
    probs[o] = std::exp(logits[o] - m);
    sum += probs[o];
  }
  for (auto& q : probs) q /= sum;
  return std::log(sum) + m - logits[target];
}

// Adds the gradient of the summed loss over `n` rows into `g` and returns the
// summed loss. Callers divide by the batch size.
template <typename T>
T accumulate_gradients(const ParamView<T>& p, const float* x, const std::size_t* targets, std::size_t n,
                       GradView<T> g, Workspace<T>& ws) {
  const std::size_t H = p.d_hidden, O = p.d_out;
  T loss = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const float* xr = x + r * p.d_in;
    forward_row(p, xr, ws);
    loss += softmax_xent<T>(ws.z2, targets[r], ws.dz2);
    ws.dz2[targets[r]] -= T(1);

    for (std::size_t o = 0; o < O; ++o) g.b2[o] += ws.dz2[o];
    for (std::size_t j = 0; j < H; ++j) {
      const T hj = ws.h[j];
      const T* w = p.w2 + j * O;
      T* gw = g.w2 + j * O;
      T dh = 0;
      for (std::size_t o = 0; o < O; ++o) {
        gw[o] += hj * ws.dz2[o];
        dh += w[o] * ws.dz2[o];
      }
      ws.dz1[j] = dh * activate_grad(ws.z1[j], hj, p.activation);
    }
    for (std::size_t j = 0; j < H; ++j) g.b1[j] += ws.dz1[j];
    for (std::size_t i = 0; i < p.d_in; ++i) {
      const T xi = static_cast<T>(xr[i]);
      if (xi == T(0)) continue;
      T* gw = g.w1 + i * H;
      const T* dz = ws.dz1.data();
      for (std::size_t j = 0; j < H; ++j) gw[j] += xi * dz[j];
    }
  }
  return loss;
}

template <typename T>
T summed_loss(const ParamView<T>& p, const float* x, const std::size_t* targets, std::size_t n, Workspace<T>& ws) {
  T loss = 0;
  for (std::size_t r = 0; r < n; ++r) {
    forward_row(p, x + r * p.d_in, ws);
    loss += softmax_xent<T>(ws.z2, targets[r], ws.dz2);
  }
  return loss;
}

inline ParamView<float> view(const MlpModel& m) {
  return {m.d_in, m.d_hidden, m.d_out, m.activation, m.w1.data(), m.b1.data(), m.w2.data(), m.b2.data()};
}

// Index of the first maximal value.
template <typename T>
std::size_t argmax(std::span<const T> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace synve::detail
