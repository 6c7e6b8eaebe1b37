#pragma once

#include <string>
#include <vector>

namespace fpg::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kNumericalAbort = 2,
  kCheckFailed = 3,
};

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args);

/// Parses "lo:hi:step" into an inclusive grid.
std::vector<double> parse_alpha_range(const std::string& spec);

}  // namespace fpg::cli
