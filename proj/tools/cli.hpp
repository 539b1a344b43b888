#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace verity::cli {

/// Exit codes: 0 success, 1 runtime failure (including any failed claim in
/// `evaluate`), 2 usage errors and missing artifacts.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line in-process. `args` excludes the program name.
/// Results go to `out`; the resolved configuration, diagnostics and errors to
/// `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace verity::cli
