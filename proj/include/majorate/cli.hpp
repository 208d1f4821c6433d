#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace majorate::cli {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitCap = 3;

/// Runs one command. `args` excludes the program name. Output goes to `--out`
/// when given, otherwise to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace majorate::cli
