#pragma once

#include <string>
#include <vector>

namespace heatbound::cli {

// Exit codes: 0 success / all pass, 1 verification violation, 2 usage error,
// 3 precision (series reliability) error.
int run(int argc, const char* const* argv);
// Convenience for tests; args excludes the program name.
int run(const std::vector<std::string>& args);

// Grid flag syntax: "log:a:b:k" or a comma list "0,0.5,1".
std::vector<double> parse_grid(const std::string& text);

}  // namespace heatbound::cli
