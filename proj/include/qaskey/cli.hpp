#ifndef QASKEY_CLI_HPP
#define QASKEY_CLI_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace qaskey::cli {

enum ExitCode : int {
  kOk = 0,
  kBadInput = 1,
  kVerificationFailure = 2,
  kConvergenceFailure = 3,
};

/// Everything needed to reproduce an artifact. Numbers that reach the
/// library stay decimal strings so a job file means the same thing at every
/// precision.
struct JobSpec {
  std::optional<std::string> preset;
  std::vector<std::string> args;
  /// a1, a2, b0, b1, b2, s1, s2; used when no preset is named.
  std::vector<std::string> params;
  std::string q = "0.5";
  /// Decimal digits; 16 or less selects double.
  int precision = 16;
  /// Series tolerance; empty means the mode default.
  std::string tol;
  std::size_t nmax = 8;
  /// Last weight index for `weights`, first node budget for `verify`.
  std::size_t nodes = 64;
  std::size_t max_nodes = 1024;
  std::string route = "abs-form";
  std::string format = "csv";
  /// Off-diagonal Gram tolerance for `verify`; empty means the mode default.
  std::string residual_tol;
  /// Artifact selectors run by `run`: weights, recurrence, reparam, verify,
  /// moments, presets.
  std::vector<std::string> outputs;

  bool operator==(const JobSpec&) const = default;
};

nlohmann::ordered_json to_json(const JobSpec& job);
/// Throws std::invalid_argument on a malformed document.
JobSpec job_from_json(const nlohmann::json& doc);

/// argv[0] is the program name. Artifacts go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace qaskey::cli

#endif  // QASKEY_CLI_HPP
