#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "synve/eval_metrics.hpp"
#include "synve/mlp.hpp"
#include "synve/trainer.hpp"

namespace synve {

enum class NeutralHandling { count_as_error, exclude_and_report };

std::string_view to_string(NeutralHandling handling);
std::optional<NeutralHandling> parse_neutral_handling(std::string_view text);

// Model labels keep their identity on the target; labels outside the target
// label set (neutral on a two-label dataset) are handled per neutral_handling.
struct TransferPolicy {
  NeutralHandling neutral_handling = NeutralHandling::count_as_error;
  // Declared target label set; defaults to the labels present in gold.
  std::optional<std::vector<Label>> target_labels;
};

struct TransferReport {
  EvalReport report;
  NeutralHandling neutral_handling = NeutralHandling::count_as_error;
  std::vector<Label> target_labels;
  std::size_t neutral_predictions = 0;
  std::size_t excluded = 0;  // examples dropped under exclude_and_report
};

// Scores already-made predictions (in the model's full label space) against
// target gold labels.
TransferReport score_transfer(std::span<const Label> gold, std::span<const Label> pred,
                              const TransferPolicy& policy = {});

// Predicts every target pair with `model` and scores it with score_transfer.
// Throws InputError on empty targets or when the model input width is not
// five times the target store dimension.
TransferReport evaluate_transfer(const MlpModel& model, const ResolvedPairs& target,
                                 const TransferPolicy& policy = {});

}  // namespace synve
