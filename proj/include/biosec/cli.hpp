#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace biosec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitValidation = 2;

/// Runs one command line (without the program name). Results go to `out` as
/// JSON (default) or CSV; diagnostics go to `err`. Returns the process exit code.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace biosec::cli
