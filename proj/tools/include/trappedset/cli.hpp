#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace trappedset::cli {

/// Exit statuses of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;     ///< estimator could not produce a result
inline constexpr int kExitValidation = 2;  ///< bad flags, config or model
inline constexpr int kExitResource = 3;    ///< a resource cap was hit
inline constexpr int kExitUsage = 64;      ///< unknown subcommand

/// Runs one invocation; args excludes the program name. CSV goes to `out`
/// unless --output names a file, diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

}  // namespace trappedset::cli
