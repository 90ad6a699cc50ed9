#pragma once

#include <iosfwd>

namespace bellmzi {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // validation failure or runtime error
inline constexpr int kExitUsage = 2;

/// Entry point of the `bellmzi` tool. Machine-readable results go to `out`,
/// progress and diagnostics to `err`.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bellmzi
