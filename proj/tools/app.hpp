#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qdist::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Runs the command line (args excludes the program name). Returns the
/// process exit code: 0 success, 1 validation error, 2 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qdist::cli
