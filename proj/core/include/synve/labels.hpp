#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace synve {

enum class Label : unsigned char { entailment = 0, neutral = 1, contradiction = 2 };

inline constexpr std::size_t kNumLabels = 3;

// Output order of every classifier in this library.
inline constexpr std::array<Label, kNumLabels> kLabelOrder = {
    Label::entailment, Label::neutral, Label::contradiction};

std::string_view to_string(Label label);
std::optional<Label> parse_label(std::string_view text);

inline std::size_t label_index(Label label) { return static_cast<std::size_t>(label); }

inline std::vector<Label> canonical_label_order() {
  return {kLabelOrder.begin(), kLabelOrder.end()};
}

}  // namespace synve
