#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace pima {

enum class Protocol { pima, tdma, saloha };

/// Backlog-estimate update used by stabilized slotted ALOHA.
enum class SalohaRule {
    /// Collision: G + N theta + 1/(e-2). Idle or success: max(N theta, G + N theta - 1).
    rivest,
    /// Only a success takes the decreasing branch; idle and collision both
    /// take the increasing one.
    merged,
};

std::string_view to_string(Protocol p);
std::string_view to_string(SalohaRule r);
/// Throws ConfigError naming `field`.
Protocol parse_protocol(std::string_view text, const std::string& field = "protocol");
SalohaRule parse_saloha_rule(std::string_view text, const std::string& field = "saloha_rule");

/// Fully specified simulation cell. Durations are slot counts unless the
/// name says otherwise.
struct SimConfig {
    Protocol protocol = Protocol::pima;
    int users = 20;
    double lambda_total = 0.1;  // packets per slot, all users
    int buffer = 3;
    double slot_us = 125.0;
    double bandwidth_hz = 1e8;
    double noise_power = 0.1;  // linear
    std::optional<double> pe_target = 0.3;
    std::optional<std::uint64_t> m1;
    std::uint64_t seed = 1;
    std::uint64_t horizon_slots = 1'000'000;
    std::uint64_t warmup_slots = 10'000;
    SalohaRule saloha_rule = SalohaRule::rivest;
    bool perfect_estimation = false;
    bool skip_empty_dt = false;

    /// Throws ConfigError naming the first invalid field.
    void validate() const;

    double slot_duration_s() const { return slot_us * 1e-6; }
    double per_user_rate() const { return lambda_total / users; }
    /// Explicit m1, or the sample count meeting pe_target.
    std::uint64_t resolved_m1() const;
    double pia_duration_s() const;
    double pia_slots() const { return pia_duration_s() / slot_duration_s(); }
    /// 0 for protocols without a sensing sub-frame.
    double l1_us() const;

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

}  // namespace pima
