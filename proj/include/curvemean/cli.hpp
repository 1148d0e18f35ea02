#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace curvemean::cli {

/// Exit codes: 0 success, 1 internal error, 2 input error.
int run(int argc, char** argv);

/// `args` excludes the program name. Data goes to `out` when no output path
/// is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace curvemean::cli
