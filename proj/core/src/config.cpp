#include "pima/config.hpp"

#include <cmath>

#include "pima/estimator.hpp"
#include "pima/traffic.hpp"

namespace pima {

std::string_view to_string(Protocol p)
{
    switch (p) {
    case Protocol::pima:
        return "pima";
    case Protocol::tdma:
        return "tdma";
    case Protocol::saloha:
        return "saloha";
    }
    return "?";
}

std::string_view to_string(SalohaRule r)
{
    return r == SalohaRule::rivest ? "rivest" : "merged";
}

Protocol parse_protocol(std::string_view text, const std::string& field)
{
    if (text == "pima") {
        return Protocol::pima;
    }
    if (text == "tdma") {
        return Protocol::tdma;
    }
    if (text == "saloha") {
        return Protocol::saloha;
    }
    throw ConfigError(field, "unknown protocol '" + std::string(text) + "' (expected pima, tdma or saloha)");
}

SalohaRule parse_saloha_rule(std::string_view text, const std::string& field)
{
    if (text == "rivest") {
        return SalohaRule::rivest;
    }
    if (text == "merged") {
        return SalohaRule::merged;
    }
    throw ConfigError(field, "unknown rule '" + std::string(text) + "' (expected rivest or merged)");
}

void SimConfig::validate() const
{
    if (users < 1) {
        throw ConfigError("users", "must be at least 1");
    }
    if (!(lambda_total >= 0.0) || !std::isfinite(lambda_total)) {
        throw ConfigError("lambda_total", "must be a finite non-negative rate");
    }
    if (buffer < 1) {
        throw ConfigError("buffer", "must be at least 1");
    }
    if (!(slot_us > 0.0) || !std::isfinite(slot_us)) {
        throw ConfigError("slot_us", "must be positive");
    }
    if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz)) {
        throw ConfigError("bandwidth_hz", "must be positive");
    }
    if (!(noise_power > 0.0) || !std::isfinite(noise_power)) {
        throw ConfigError("noise_power", "must be positive");
    }
    if (pe_target && m1) {
        throw ConfigError("m1", "pe_target and m1 are mutually exclusive");
    }
    if (!pe_target && !m1) {
        throw ConfigError("pe_target", "one of pe_target or m1 is required");
    }
    if (pe_target && !(*pe_target > 0.0 && *pe_target < 1.0)) {
        throw ConfigError("pe_target", "must lie in (0, 1)");
    }
    if (m1 && *m1 < 1) {
        throw ConfigError("m1", "must be at least 1");
    }
}

std::uint64_t SimConfig::resolved_m1() const
{
    return m1 ? *m1 : required_samples(users, noise_power, pe_target.value_or(0.3));
}

double SimConfig::pia_duration_s() const
{
    return static_cast<double>(resolved_m1()) / bandwidth_hz;
}

double SimConfig::l1_us() const
{
    return protocol == Protocol::pima ? static_cast<double>(resolved_m1()) * 1e6 / bandwidth_hz : 0.0;
}

}  // namespace pima
