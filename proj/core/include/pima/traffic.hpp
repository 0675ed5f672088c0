#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pima/random.hpp"

namespace pima {

/// Raised for invalid configuration values; `field()` names the offender.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field))
    {
    }
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Uplink data unit. `gen_time` is in slots since simulation start.
struct Packet {
    int owner = 0;
    double gen_time = 0.0;
    std::uint64_t seq = 0;

    friend bool operator==(const Packet&, const Packet&) = default;
};

/// Bounded FIFO with drop-oldest eviction.
class UserBuffer {
public:
    explicit UserBuffer(std::size_t capacity);

    /// Appends `pkt`; when the buffer was full the oldest packet is evicted
    /// and returned.
    std::optional<Packet> push(const Packet& pkt);
    /// Throws std::logic_error on an empty buffer.
    Packet pop_head();
    const Packet& head() const;

    bool is_active() const noexcept { return !queue_.empty(); }
    std::size_t size() const noexcept { return queue_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    std::uint64_t dropped() const noexcept { return dropped_; }
    const std::deque<Packet>& queue() const noexcept { return queue_; }

private:
    std::size_t capacity_;
    std::deque<Packet> queue_;
    std::uint64_t dropped_ = 0;
};

struct TrafficConfig {
    int users = 20;
    double total_rate = 0.0;  // packets per slot, all users

    double per_user_rate() const { return total_rate / users; }
};

/// Sorted arrival times of a homogeneous Poisson process on [0, duration).
std::vector<double> generate_arrivals(double rate, double duration, Rng& rng);

/// Lazily generated superposition of `users` independent Poisson streams.
///
/// Interarrival times are exponential with the total rate and each arrival
/// is attributed to a uniformly drawn user, which is the same law as
/// merging per-user processes. Arrivals stop at `end_time`.
class ArrivalStream {
public:
    ArrivalStream(const TrafficConfig& config, double end_time, Rng& rng);

    bool exhausted() const noexcept { return !next_.has_value(); }
    /// Next pending arrival; requires !exhausted().
    const Packet& peek() const { return *next_; }
    Packet pop();

    std::uint64_t emitted() const noexcept { return emitted_; }

private:
    void advance();

    TrafficConfig config_;
    double end_time_;
    Rng* rng_;
    double clock_ = 0.0;
    std::optional<Packet> next_;
    std::vector<std::uint64_t> seq_;
    std::uint64_t emitted_ = 0;
};

}  // namespace pima
