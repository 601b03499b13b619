#pragma once

#include "circmax/common/error.h"

#include <iosfwd>

namespace circmax::harness {

/// Exit codes besides the ErrorKind values (10 and up).
inline constexpr int kExitOk = 0;
inline constexpr int kExitAcceptanceFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitUnexpected = 3;

inline int exit_code(ErrorKind kind) { return static_cast<int>(kind); }

/// The circmax command line. Returns the process exit code; never throws.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace circmax::harness
