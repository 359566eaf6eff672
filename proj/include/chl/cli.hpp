#pragma once

#include <string>
#include <vector>

#include "chl/conformal.hpp"

namespace chl {

enum ExitCode : int { kExitPass = 0, kExitCheckFailed = 1, kExitUsage = 2 };

/// Parses "a+bi", "a-bi", "a", "bi", "i" and "-i". Throws std::invalid_argument.
Complex parse_complex(const std::string& text);

/// Entry point of the `chl` binary; args[0] is the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace chl
