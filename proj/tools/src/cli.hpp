#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tcost::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kInvalidInput = 2,
  kNoBracket = 3,
  kToleranceFailed = 4,
};

/// Runs the tcost command line. args excludes the program name. Reports go to
/// out (or to --out), diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tcost::cli
