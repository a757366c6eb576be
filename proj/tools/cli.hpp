#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace boxguide::cli {

// Exit codes: 0 success, 1 numerical failure or failed validation, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitUsage = 2;

// args excludes the program name. Results go to out (or --out), diagnostics and
// the JSON error record to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Grid syntax: comma-separated items, each a number or "a:b:n" (n equispaced
// points, endpoints included). With allow_threshold, a trailing "t" on a value
// multiplies it by threshold. Throws std::invalid_argument unless the grid is
// non-empty and strictly increasing.
std::vector<double> parse_grid(const std::string& spec, double threshold = 0.0, bool allow_threshold = false);

}  // namespace boxguide::cli
