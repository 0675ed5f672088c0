#include "pima/config_file.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include <fmt/format.h>

#include "pima/traffic.hpp"

namespace pima {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text)
{
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError(std::string(key), "cannot parse '" + std::string(text) + "' as a number");
    }
    return value;
}

bool parse_bool(std::string_view key, std::string_view text)
{
    if (text == "true" || text == "1") {
        return true;
    }
    if (text == "false" || text == "0") {
        return false;
    }
    throw ConfigError(std::string(key), "expected true or false, got '" + std::string(text) + "'");
}

}  // namespace

std::vector<ConfigEntry> parse_config_text(std::string_view text)
{
    std::vector<ConfigEntry> entries;
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigFileError(line_no, "expected 'key = value', got '" + std::string(line) + "'");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigFileError(line_no, "missing key");
        }
        if (value.empty()) {
            throw ConfigFileError(line_no, "missing value for '" + std::string(key) + "'");
        }
        entries.push_back(ConfigEntry{std::string(key), std::string(value), line_no});
    }
    return entries;
}

std::vector<ConfigEntry> read_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::system_error(errno ? errno : ENOENT, std::generic_category(),
                                "cannot open config file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

void apply_setting(SimConfig& c, std::string_view key, std::string_view value)
{
    const std::string k(key);
    if (key == "protocol") {
        c.protocol = parse_protocol(value, k);
    } else if (key == "users") {
        c.users = parse_number<int>(key, value);
    } else if (key == "lambda_total") {
        c.lambda_total = parse_number<double>(key, value);
    } else if (key == "buffer") {
        c.buffer = parse_number<int>(key, value);
    } else if (key == "slot_us") {
        c.slot_us = parse_number<double>(key, value);
    } else if (key == "bandwidth_hz") {
        c.bandwidth_hz = parse_number<double>(key, value);
    } else if (key == "noise_db") {
        c.noise_power = std::pow(10.0, parse_number<double>(key, value) / 10.0);
    } else if (key == "noise_power") {
        c.noise_power = parse_number<double>(key, value);
    } else if (key == "pe_target") {
        c.pe_target = parse_number<double>(key, value);
        c.m1.reset();
    } else if (key == "m1") {
        c.m1 = parse_number<std::uint64_t>(key, value);
        c.pe_target.reset();
    } else if (key == "seed") {
        c.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "horizon_slots") {
        c.horizon_slots = parse_number<std::uint64_t>(key, value);
    } else if (key == "warmup_slots") {
        c.warmup_slots = parse_number<std::uint64_t>(key, value);
    } else if (key == "saloha_rule") {
        c.saloha_rule = parse_saloha_rule(value, k);
    } else if (key == "perfect_estimation") {
        c.perfect_estimation = parse_bool(key, value);
    } else if (key == "skip_empty_dt") {
        c.skip_empty_dt = parse_bool(key, value);
    } else {
        throw ConfigError(k, "unknown key");
    }
}

void apply_entries(SimConfig& config, const std::vector<ConfigEntry>& entries)
{
    for (const auto& e : entries) {
        try {
            apply_setting(config, e.key, e.value);
        } catch (const ConfigError& err) {
            throw ConfigFileError(e.line, err.what());
        }
    }
}

std::string to_config_text(const SimConfig& c)
{
    std::string out;
    out += fmt::format("protocol = {}\n", to_string(c.protocol));
    out += fmt::format("users = {}\n", c.users);
    out += fmt::format("lambda_total = {}\n", c.lambda_total);
    out += fmt::format("buffer = {}\n", c.buffer);
    out += fmt::format("slot_us = {}\n", c.slot_us);
    out += fmt::format("bandwidth_hz = {}\n", c.bandwidth_hz);
    out += fmt::format("noise_power = {}\n", c.noise_power);
    if (c.m1) {
        out += fmt::format("m1 = {}\n", *c.m1);
    } else if (c.pe_target) {
        out += fmt::format("pe_target = {}\n", *c.pe_target);
    }
    out += fmt::format("seed = {}\n", c.seed);
    out += fmt::format("horizon_slots = {}\n", c.horizon_slots);
    out += fmt::format("warmup_slots = {}\n", c.warmup_slots);
    out += fmt::format("saloha_rule = {}\n", to_string(c.saloha_rule));
    out += fmt::format("perfect_estimation = {}\n", c.perfect_estimation);
    out += fmt::format("skip_empty_dt = {}\n", c.skip_empty_dt);
    return out;
}

}  // namespace pima
