#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ccbench::cli {

// Exit codes are part of the command-line contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitBridge = 4;
inline constexpr int kExitIncompleteGrid = 5;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "CCBENCH_OUT";

/// Runs one ccbench invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ccbench::cli
