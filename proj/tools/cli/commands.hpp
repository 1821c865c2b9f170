#pragma once

#include <ostream>
#include <span>
#include <string>

namespace synve::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;

// Entry point shared by main() and the tests. `args` excludes the program
// name. Subcommands: validate, stats, curves, train, eval, transfer, run-all.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace synve::cli
