#pragma once

#include <ostream>

namespace bulksurf::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitHypothesisFailed = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitBlowup = 3;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bulksurf::cli
