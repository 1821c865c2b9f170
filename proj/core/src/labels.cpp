#include "synve/labels.hpp"

namespace synve {

std::string_view to_string(Label label) {
  switch (label) {
    case Label::entailment:
      return "entailment";
    case Label::neutral:
      return "neutral";
    case Label::contradiction:
      return "contradiction";
  }
  return "unknown";
}

std::optional<Label> parse_label(std::string_view text) {
  for (Label label : kLabelOrder) {
    if (to_string(label) == text) return label;
  }
  return std::nullopt;
}

}  // namespace synve
