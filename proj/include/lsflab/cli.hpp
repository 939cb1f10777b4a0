#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lsflab::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kNumericalFailure = 1;
inline constexpr int kConfigError = 2;

/// Runs `lsflab <args...>`; args excludes the program name. Subcommands:
/// solve, analyze, perturb. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lsflab::cli
