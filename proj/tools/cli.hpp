#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace selfnorm::cli {

/// Runs the command line. Returns 0 when every check passes, 1 on a
/// tolerance failure and 2 on a usage or configuration error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace selfnorm::cli
