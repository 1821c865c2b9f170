#pragma once

#include <stdexcept>
#include <string>

namespace synve {

// Raised for malformed files, violated invariants, and unmet preconditions on
// caller-supplied data. The CLI maps it to exit code 2; anything else is an
// internal error.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace synve
