#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace ldom::cli {

/// Exit codes shared by every command.
enum Exit : int { kOk = 0, kUsage = 1, kContract = 2 };

/// Runs one command line (argv[0] is the program name). Reports go to
/// `out`, diagnostics to `err`.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ldom::cli
