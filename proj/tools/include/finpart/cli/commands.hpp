#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "finpart/cli/problem.hpp"
#include "json.hpp"

namespace finpart::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kInvalidInput = 2, kNumericalFailure = 3 };

struct RunOptions {
  std::optional<std::string> engine;  // overrides the spec
  std::optional<double> tolerance;    // overrides the spec
  std::optional<std::uint64_t> seed;  // overrides the spec
  std::optional<Complex> s;           // zeta
  std::optional<double> t;            // level-set
  std::optional<double> eps;          // cutoff
  std::string check;                  // check kind
};

struct Report {
  int exit_code = kOk;
  nlohmann::json json;
  std::string message;  // diagnostic for non-zero exit codes
};

const std::vector<std::string>& command_names();
const std::vector<std::string>& check_names();

// Never throws for library errors: they map to exit codes 2 and 3.
Report run(const std::string& command, const ProblemSpec& spec, const RunOptions& options);
Report run_text(const std::string& command, const std::string& spec_text, const RunOptions& options);

// Report text without the wall-clock field.
std::string payload(const nlohmann::json& report);

// Parses "RE,IM" or "RE".
Complex parse_complex_argument(const std::string& text);

}  // namespace finpart::cli
