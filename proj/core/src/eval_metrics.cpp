#include "synve/eval_metrics.hpp"

#include <algorithm>
#include <array>

#include <fmt/format.h>

#include "synve/error.hpp"

namespace synve {

namespace {

std::size_t position_of(std::span<const Label> order, Label label) {
  auto it = std::find(order.begin(), order.end(), label);
  if (it == order.end()) throw InputError(fmt::format("label '{}' not in label order", to_string(label)));
  return static_cast<std::size_t>(it - order.begin());
}

}  // namespace

EvalReport evaluate(std::span<const Label> gold, std::span<const Label> pred, std::span<const Label> label_order) {
  if (gold.size() != pred.size()) {
    throw InputError(fmt::format("gold has {} labels but predictions have {}", gold.size(), pred.size()));
  }
  if (gold.empty()) throw InputError("cannot evaluate an empty label sequence");
  const std::size_t L = label_order.size();

  EvalReport r;
  r.label_order.assign(label_order.begin(), label_order.end());
  r.n = gold.size();
  r.confusion.assign(L, std::vector<std::size_t>(L, 0));
  for (std::size_t i = 0; i < gold.size(); ++i) {
    r.confusion[position_of(label_order, gold[i])][position_of(label_order, pred[i])] += 1;
  }

  std::size_t correct = 0;
  for (std::size_t c = 0; c < L; ++c) correct += r.confusion[c][c];
  r.accuracy = static_cast<double>(correct) / static_cast<double>(r.n);

  double f1_sum = 0.0;
  std::size_t gold_classes = 0;
  std::size_t max_support = 0;
  for (std::size_t c = 0; c < L; ++c) {
    std::size_t support = 0, predicted = 0;
    for (std::size_t o = 0; o < L; ++o) {
      support += r.confusion[c][o];
      predicted += r.confusion[o][c];
    }
    max_support = std::max(max_support, support);
    if (support == 0 && predicted == 0) continue;
    const std::size_t tp = r.confusion[c][c];
    ClassScores s;
    s.support = support;
    s.precision = predicted == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(predicted);
    s.recall = support == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(support);
    s.f1 = (s.precision + s.recall) == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / (s.precision + s.recall);
    r.per_class[label_order[c]] = s;
    if (support > 0) {
      f1_sum += s.f1;
      ++gold_classes;
    }
  }
  r.macro_f1 = f1_sum / static_cast<double>(gold_classes);
  r.majority_baseline_accuracy = static_cast<double>(max_support) / static_cast<double>(r.n);
  return r;
}

double majority_baseline(std::span<const Label> gold) {
  if (gold.empty()) throw InputError("majority baseline of an empty label sequence");
  std::array<std::size_t, kNumLabels> counts{};
  for (Label l : gold) counts[label_index(l)] += 1;
  const auto top = *std::max_element(counts.begin(), counts.end());
  return static_cast<double>(top) / static_cast<double>(gold.size());
}

}  // namespace synve
