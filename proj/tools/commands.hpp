#pragma once

#include <filesystem>
#include <string>

#include "run_config.hpp"

namespace slagfib::cli {

/// Process exit codes; a stable public contract.
enum ExitCode : int {
  kSuccess = 0,
  kInternalError = 1,
  kConfigError = 2,
  kCertificateFailure = 3,
  kSolverFailure = 4,
  kEmbeddingFailure = 5,
  kVerificationFailure = 6,
};

struct Context {
  RunConfig config;
  std::filesystem::path out;
  int threads = 0;
};

int cmd_generate(const Context& ctx);
int cmd_certify(const Context& ctx);
int cmd_solve(const Context& ctx);
int cmd_fibrate(const Context& ctx);
int cmd_verify(const Context& ctx);
int cmd_report(const Context& ctx);

/// Runs a command and maps library errors onto exit codes, printing one
/// diagnostic line to stderr.
int run_guarded(int (*command)(const Context&), const Context& ctx);

}  // namespace slagfib::cli
