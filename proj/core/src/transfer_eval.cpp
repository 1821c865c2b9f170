#include "synve/transfer_eval.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "synve/error.hpp"

namespace synve {

std::string_view to_string(NeutralHandling handling) {
  return handling == NeutralHandling::count_as_error ? "count_as_error" : "exclude_and_report";
}

std::optional<NeutralHandling> parse_neutral_handling(std::string_view text) {
  if (text == "count_as_error") return NeutralHandling::count_as_error;
  if (text == "exclude_and_report") return NeutralHandling::exclude_and_report;
  return std::nullopt;
}

TransferReport score_transfer(std::span<const Label> gold, std::span<const Label> pred, const TransferPolicy& policy) {
  if (gold.empty()) throw InputError("empty target set");
  if (gold.size() != pred.size()) throw InputError("gold and prediction lengths differ");

  TransferReport out;
  out.neutral_handling = policy.neutral_handling;
  if (policy.target_labels) {
    out.target_labels = *policy.target_labels;
  } else {
    for (Label l : kLabelOrder) {
      if (std::find(gold.begin(), gold.end(), l) != gold.end()) out.target_labels.push_back(l);
    }
  }
  auto in_target = [&](Label l) {
    return std::find(out.target_labels.begin(), out.target_labels.end(), l) != out.target_labels.end();
  };
  for (Label l : gold) {
    if (!in_target(l)) throw InputError(fmt::format("gold label '{}' outside the target label set", to_string(l)));
  }
  out.neutral_predictions = static_cast<std::size_t>(std::count(pred.begin(), pred.end(), Label::neutral));

  // Predictions stay in the model's label space; under count_as_error a
  // label the target lacks simply never matches gold.
  if (policy.neutral_handling == NeutralHandling::count_as_error) {
    out.report = evaluate(gold, pred, kLabelOrder);
    return out;
  }

  std::vector<Label> kept_gold, kept_pred;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (!in_target(pred[i])) {
      ++out.excluded;
      continue;
    }
    kept_gold.push_back(gold[i]);
    kept_pred.push_back(pred[i]);
  }
  if (kept_gold.empty()) throw InputError("every prediction fell outside the target label set");
  out.report = evaluate(kept_gold, kept_pred, kLabelOrder);
  return out;
}

TransferReport evaluate_transfer(const MlpModel& model, const ResolvedPairs& target, const TransferPolicy& policy) {
  if (target.empty()) throw InputError("empty target set");
  if (target.store == nullptr || 5 * static_cast<std::size_t>(target.store->dim()) != model.d_in) {
    throw InputError(fmt::format("dimension mismatch: model expects {} fused features, target store has dim {}",
                                 model.d_in, target.store ? target.store->dim() : 0));
  }
  const auto pred = predict_all(model, target);
  return score_transfer(target.labels, pred, policy);
}

}  // namespace synve
