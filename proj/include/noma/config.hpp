#pragma once

// Flat `key = value` configuration files. Missing keys keep the reference
// defaults; SNR is read in dB and converted to linear here only.

#include "noma/model.hpp"

#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace noma::cli {

/// Keys accepted in configuration files and `--set` overrides.
const std::vector<std::string>& config_keys();

/// Parsed configuration plus the line each key came from (0 for overrides).
struct ConfigSource {
    SystemConfig cfg = SystemConfig::defaults();
    std::map<std::string, int> lines;
};

/// Applies one `key = value` assignment; throws ConfigError naming key and line.
void apply_setting(ConfigSource& src, std::string_view key, std::string_view value, int line);

/// Parses a whole file body. `#` starts a comment; blank lines are ignored.
ConfigSource parse_config(std::istream& in);
ConfigSource parse_config_file(const std::string& path);

/// Applies `key=value` overrides from the command line.
void apply_overrides(ConfigSource& src, const std::vector<std::string>& assignments);

/// Validates the assembled config, reporting violations as ConfigError against
/// the key responsible.
void finalize(const ConfigSource& src);

double db_to_linear(double db);
double linear_to_db(double linear);

}  // namespace noma::cli
