#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mpising {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kJsonSchemaVersion = 1;

/// Exit codes: 0 ok, 1 runtime failure, 2 validation failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "16:128" -> 16, 32, 64, 128.
std::vector<int> parse_ladder(const std::string& text);

}  // namespace mpising
