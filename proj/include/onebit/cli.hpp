#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>

namespace onebit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDiscarded = 3;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads "key = value" lines; '#' and ';' start comments. Keys use the long
/// flag names with '-' or '_'. Unknown keys and malformed lines throw
/// ConfigError naming the offending key or line.
std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path);

/// Runs one command: fisher | bound | track | sweep | transient.
/// Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// 17 significant digits, '.' decimal point.
std::string format_double(double value);

}  // namespace onebit::cli
