#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "pima/config.hpp"
#include "pima/estimator.hpp"
#include "pima/metrics.hpp"
#include "pima/scheduler.hpp"
#include "pima/traffic.hpp"

namespace pima {

/// Collects events in memory; mostly for tests and traces.
class EventLog final : public EventSink {
public:
    void on_generated(const Packet& p) override { generated.push_back(p); }
    void on_event(const DeliveryEvent& event) override { events.push_back(event); }

    std::vector<Packet> generated;
    std::vector<DeliveryEvent> events;
};

/// K drop-oldest buffers fed from an arrival stream.
class BufferBank {
public:
    BufferBank(int users, std::size_t capacity);

    /// Pushes every pending arrival with gen_time < `until` in time order.
    /// With `batched` set the packets are admitted at `until` (evictions are
    /// stamped then); otherwise each enters at its generation time.
    void admit_until(ArrivalStream& arrivals, double until, EventSink& sink, bool batched = false);
    /// Pushes one packet, reporting any eviction at `at` (default: gen_time).
    void admit(const Packet& p, EventSink& sink, std::optional<double> at = std::nullopt);

    int users() const noexcept { return static_cast<int>(buffers_.size()); }
    UserBuffer& operator[](int k) { return buffers_[static_cast<std::size_t>(k)]; }
    const UserBuffer& operator[](int k) const { return buffers_[static_cast<std::size_t>(k)]; }
    int active_count() const;
    std::uint64_t queued() const;
    /// Queued packets satisfying the collector's warmup filter.
    std::uint64_t queued_counted(const MetricsCollector& collector) const;

private:
    std::vector<UserBuffer> buffers_;
};

/// One PIMA frame as seen by the base station.
struct FrameTrace {
    std::uint64_t frame = 0;
    double start = 0.0;  // slots
    int active = 0;
    int estimate = 0;
    int dt_slots = 0;
    int successes = 0;
    int collisions = 0;
    int idle = 0;
};

/// Writes one JSON object per line.
void write_trace_line(std::ostream& out, const FrameTrace& trace);

struct PimaOptions {
    PowerModel model;
    double pia_slots = 0.0;  // sensing sub-frame length in slot units
    std::optional<ActivityPrior> prior;  // MAP regions when set
    bool perfect_estimation = false;
    bool skip_empty_dt = false;
};

/// Frame-based engine: activity sensing, then a DT sub-frame sized from
/// the estimated active count. Time is measured in slots.
///
/// Packets generated during a frame are held back and enter their owner's
/// buffer at the next frame start, after the frame's departures; drop-oldest
/// eviction is applied at that point.
class PimaEngine {
public:
    PimaEngine(int users, std::size_t buffer_capacity, PimaOptions options);

    FrameTrace run_frame(ArrivalStream& arrivals, Rng& estimator_rng, Rng& scheduler_rng, EventSink& sink);

    /// Frame-start time: integer DT slots plus one sensing interval per frame.
    double clock() const noexcept
    {
        return static_cast<double>(dt_slots_elapsed_) + static_cast<double>(frames_) * options_.pia_slots;
    }
    std::uint64_t frames() const noexcept { return frames_; }
    std::uint64_t dt_slots_elapsed() const noexcept { return dt_slots_elapsed_; }
    BufferBank& buffers() noexcept { return buffers_; }
    const BufferBank& buffers() const noexcept { return buffers_; }
    const DecisionRegions& regions() const noexcept { return regions_; }
    const ScheduleTable& table() const noexcept { return table_; }

private:
    BufferBank buffers_;
    PimaOptions options_;
    DecisionRegions regions_;
    ScheduleTable table_;
    std::uint64_t frames_ = 0;
    std::uint64_t dt_slots_elapsed_ = 0;
    std::vector<char> committed_;
    std::vector<std::vector<int>> slot_users_;
};

/// Fixed K-slot frames, user k owns slot k.
class TdmaEngine {
public:
    TdmaEngine(int users, std::size_t buffer_capacity);

    /// Returns the number of deliveries in the frame.
    int run_frame(ArrivalStream& arrivals, EventSink& sink);

    double clock() const noexcept { return static_cast<double>(slots_elapsed_); }
    BufferBank& buffers() noexcept { return buffers_; }

private:
    BufferBank buffers_;
    std::uint64_t slots_elapsed_ = 0;
};

enum class Feedback { idle, success, collision };

struct SlotResult {
    Feedback feedback = Feedback::idle;
    int transmitters = 0;
    double backlog_estimate = 0.0;  // G used in this slot
    double transmit_prob = 1.0;
};

struct SalohaOptions {
    SalohaRule rule = SalohaRule::rivest;
    /// Per-slot arrival probability of one user, theta = 1 - exp(-lambda).
    double arrival_prob = 0.0;
    /// Overrides min(1, 1/G) when set.
    std::optional<double> fixed_transmit_prob;
};

/// Next backlog estimate from the current one and this slot's feedback.
double next_backlog_estimate(double backlog, double expected_arrivals, Feedback feedback, SalohaRule rule);
double transmit_probability(double backlog);

/// Stabilized slotted ALOHA with a pseudo-Bayesian backlog estimate.
class SalohaEngine {
public:
    SalohaEngine(int users, std::size_t buffer_capacity, SalohaOptions options);

    SlotResult step(ArrivalStream& arrivals, Rng& access_rng, EventSink& sink);

    double clock() const noexcept { return static_cast<double>(slot_); }
    double backlog_estimate() const noexcept { return backlog_; }
    BufferBank& buffers() noexcept { return buffers_; }

private:
    BufferBank buffers_;
    SalohaOptions options_;
    double backlog_ = 0.0;
    std::uint64_t slot_ = 0;
};

/// Runs one cell over [0, warmup + horizon) slots and aggregates metrics
/// for packets generated after warmup. `trace`, when set, receives one
/// line per PIMA frame.
Metrics run_protocol(const SimConfig& config, std::ostream* trace = nullptr);

}  // namespace pima
