#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>

#include "pima/traffic.hpp"

namespace pima {

enum class Outcome { delivered, dropped };

/// A packet leaving the system. `at` is in slots: the start of the
/// successful slot, or the arrival time of the packet that evicted it.
struct DeliveryEvent {
    Packet packet;
    double at = 0.0;
    Outcome outcome = Outcome::delivered;
};

/// Receives admissions and departures from the protocol engines.
class EventSink {
public:
    virtual ~EventSink() = default;
    virtual void on_generated(const Packet&) {}
    virtual void on_event(const DeliveryEvent& event) = 0;
};

/// Latency histogram with 10 log-spaced bins per decade from 1 us to 10 s,
/// plus underflow (bin 0) and overflow (last bin).
class LatencyHistogram {
public:
    static constexpr double kLowest = 1e-6;
    static constexpr int kBinsPerDecade = 10;
    static constexpr int kDecades = 7;
    static constexpr std::size_t kBins = kBinsPerDecade * kDecades + 2;

    void add(double seconds);
    std::span<const std::uint64_t> counts() const noexcept { return counts_; }
    /// Lower edge of bin i (0 for the underflow bin).
    static double lower_edge(std::size_t bin);

    friend bool operator==(const LatencyHistogram&, const LatencyHistogram&) = default;

private:
    std::array<std::uint64_t, kBins> counts_{};
};

/// Aggregated outcome of one simulation cell.
struct Metrics {
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
    std::uint64_t residual = 0;
    double latency_sum_s = 0.0;
    LatencyHistogram latency;

    // PIMA extras, over frames starting after warmup.
    std::uint64_t frames = 0;
    std::uint64_t estimate_error_sum = 0;  // sum of |nu - nu_hat|
    std::uint64_t dt_slots_sum = 0;
    // SALOHA extras, over slots after warmup.
    std::uint64_t access_slots = 0;
    double backlog_estimate_sum = 0.0;

    double drop_probability() const
    {
        return generated == 0 ? 0.0 : static_cast<double>(dropped) / static_cast<double>(generated);
    }
    std::optional<double> mean_latency_s() const
    {
        if (delivered == 0) {
            return std::nullopt;
        }
        return latency_sum_s / static_cast<double>(delivered);
    }
    std::optional<double> mean_estimate_error() const;
    std::optional<double> mean_dt_slots() const;
    std::optional<double> mean_backlog_estimate() const;
    bool conserved() const { return generated == delivered + dropped + residual; }

    friend bool operator==(const Metrics&, const Metrics&) = default;
};

/// Folds engine events into Metrics for packets generated at or after
/// `warmup_slots`.
class MetricsCollector final : public EventSink {
public:
    MetricsCollector(double warmup_slots, double slot_duration_s)
        : warmup_(warmup_slots), slot_s_(slot_duration_s)
    {
    }

    void on_generated(const Packet& p) override;
    void on_event(const DeliveryEvent& event) override;
    bool counts(const Packet& p) const { return p.gen_time >= warmup_; }

    Metrics& metrics() noexcept { return metrics_; }
    const Metrics& metrics() const noexcept { return metrics_; }

private:
    double warmup_;
    double slot_s_;
    Metrics metrics_;
};

}  // namespace pima
