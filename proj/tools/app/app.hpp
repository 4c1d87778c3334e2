#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fbsurf::app {

/// Entry point behind the `fbsurf` executable. `args` excludes the program
/// name. Returns 0 on success or the exit code of the error category.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fbsurf::app
