#pragma once

#include <ostream>
#include <stdexcept>

namespace qimaging::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPixelErrors = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses `argv` (program name first), runs one subcommand and writes its
/// report to `--out` or `out`. Diagnostics go to `err` as single lines.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qimaging::cli
