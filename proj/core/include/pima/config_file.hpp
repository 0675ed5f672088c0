#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pima/config.hpp"

namespace pima {

/// Flat `key = value` configuration text. `#` starts a comment; blank
/// lines are ignored. Keys are the CLI flag names with dashes replaced by
/// underscores.
struct ConfigEntry {
    std::string key;
    std::string value;
    int line = 0;
};

class ConfigFileError : public std::runtime_error {
public:
    ConfigFileError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }
    int line() const noexcept { return line_; }

private:
    int line_;
};

std::vector<ConfigEntry> parse_config_text(std::string_view text);
/// Throws std::system_error when the file cannot be read.
std::vector<ConfigEntry> read_config_file(const std::filesystem::path& path);

/// Sets one SimConfig field from its textual form. Throws ConfigError
/// naming the key on unknown keys or bad values. Setting `m1` clears
/// `pe_target` and vice versa; `noise_db` is converted to linear power.
void apply_setting(SimConfig& config, std::string_view key, std::string_view value);

/// Applies entries in order; ConfigError is rethrown as ConfigFileError
/// with the offending line.
void apply_entries(SimConfig& config, const std::vector<ConfigEntry>& entries);

/// Renders every field so that parsing the text back yields `config`.
std::string to_config_text(const SimConfig& config);

}  // namespace pima
