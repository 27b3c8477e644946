#pragma once

#include <iosfwd>

namespace liftcal::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

/// Parses argv, runs one subcommand and writes its JSON report to `out`.
/// Diagnostics go to `err`. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace liftcal::cli
