#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace specbound {

/// Full command dispatch. `args` excludes the program name. Returns the
/// process exit code: 0 success, 2 validation error, 3 numeric/io error,
/// 4 capacity error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace specbound
