#pragma once

#include <ostream>

namespace cascade::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the `cascade` tool. Data goes to out, diagnostics to err.
// Returns 0 on success, 2 on usage or parameter errors, 1 on runtime errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cascade::cli
