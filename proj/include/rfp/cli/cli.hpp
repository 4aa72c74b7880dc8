#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rfp::cli {

/// Runs the `rfp` command line. `args` excludes the program name. Returns 0
/// on success (including --help), 2 for usage errors and 1 for any other
/// failure, which is reported as one line on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rfp::cli
