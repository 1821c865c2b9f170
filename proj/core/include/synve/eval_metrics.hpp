#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "synve/labels.hpp"

namespace synve {

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // gold count
};

struct EvalReport {
  std::vector<Label> label_order;
  double accuracy = 0.0;
  // Classes that occur in gold or predictions.
  std::map<Label, ClassScores> per_class;
  // Unweighted mean of per-class F1 over classes present in gold.
  double macro_f1 = 0.0;
  // confusion[gold][predicted], indexed by position in label_order.
  std::vector<std::vector<std::size_t>> confusion;
  std::size_t n = 0;
  double majority_baseline_accuracy = 0.0;
};

// Throws InputError on length mismatch, empty input, or a label missing from
// label_order.
EvalReport evaluate(std::span<const Label> gold, std::span<const Label> pred,
                    std::span<const Label> label_order = kLabelOrder);

// Accuracy of always predicting the most frequent gold label.
double majority_baseline(std::span<const Label> gold);

}  // namespace synve
