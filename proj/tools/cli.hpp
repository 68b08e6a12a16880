#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qnn::cli {

/// Exit statuses of the command-line tool.
enum ExitCode : int { kSuccess = 0, kValidationError = 1, kRuntimeFailure = 2 };

/// Environment variable that overrides the OpenMP thread count.
inline constexpr const char* kThreadsEnv = "QNN_NUM_THREADS";

/// Runs one invocation; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct VerifyOptions {
  std::uint64_t seed = 1;
  std::uint64_t shots = 100000;
};

/// Invariant suite behind `qnn verify`. Writes one PASS/FAIL line per check
/// and returns true when all pass.
bool run_verify(const VerifyOptions& options, std::ostream& out);

}  // namespace qnn::cli
