#pragma once

#include <string>
#include <vector>

namespace kummer::cli {

// Single binary entry point.  Exit codes: 0 = success / all checks passed,
// 1 = a verification suite reported a failing check, 2 = usage, input, or
// domain errors.  The master seed defaults to 0xC0FFEE, overridable by the
// KUMMER_FORGE_SEED environment variable and then by --seed.
int run_cli(int argc, const char* const* argv);

// convenience overload; args[0] is the program name
int run_cli(const std::vector<std::string>& args);

}  // namespace kummer::cli
