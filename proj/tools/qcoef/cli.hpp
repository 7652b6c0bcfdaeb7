#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

namespace qcoef::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitPrecondition = 2;
inline constexpr int kExitBudget = 3;
inline constexpr int kExitUsage = 64;

/// Runs one subcommand. CSV goes to `out` (and to --out/<subcommand>.csv when
/// given), diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// "8", "2,4,8", "2:64" (doubling) or "2:64:3" (step 3).
std::vector<std::size_t> parse_n_spec(const std::string& spec);

}  // namespace qcoef::cli
