#pragma once

#include <iosfwd>

namespace fixmag {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes of the experiment runner.
enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitUsage = 2 };

/// Entry point of the `fixmag` tool. Output goes to `out` unless --out names a file.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fixmag
