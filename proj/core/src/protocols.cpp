#include "pima/protocols.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include <fmt/format.h>

namespace pima {

// ---------------------------------------------------------------------------
// BufferBank

BufferBank::BufferBank(int users, std::size_t capacity)
{
    if (users < 1) {
        throw ConfigError("users", "must be at least 1");
    }
    buffers_.assign(static_cast<std::size_t>(users), UserBuffer(capacity));
}

void BufferBank::admit_until(ArrivalStream& arrivals, double until, EventSink& sink, bool batched)
{
    while (!arrivals.exhausted() && arrivals.peek().gen_time < until) {
        admit(arrivals.pop(), sink, batched ? std::optional<double>(until) : std::nullopt);
    }
}

void BufferBank::admit(const Packet& p, EventSink& sink, std::optional<double> at)
{
    sink.on_generated(p);
    if (auto evicted = buffers_.at(static_cast<std::size_t>(p.owner)).push(p)) {
        sink.on_event(DeliveryEvent{*evicted, at.value_or(p.gen_time), Outcome::dropped});
    }
}

int BufferBank::active_count() const
{
    int n = 0;
    for (const auto& b : buffers_) {
        n += b.is_active() ? 1 : 0;
    }
    return n;
}

std::uint64_t BufferBank::queued() const
{
    std::uint64_t n = 0;
    for (const auto& b : buffers_) {
        n += b.size();
    }
    return n;
}

std::uint64_t BufferBank::queued_counted(const MetricsCollector& collector) const
{
    std::uint64_t n = 0;
    for (const auto& b : buffers_) {
        for (const auto& p : b.queue()) {
            n += collector.counts(p) ? 1 : 0;
        }
    }
    return n;
}

void write_trace_line(std::ostream& out, const FrameTrace& t)
{
    out << fmt::format(R"({{"t":{},"start":{},"nu":{},"nu_hat":{},"L2":{},"successes":{},"collisions":{},"idle":{}}})",
                       t.frame, t.start, t.active, t.estimate, t.dt_slots, t.successes, t.collisions, t.idle)
        << '\n';
}

// ---------------------------------------------------------------------------
// PIMA

namespace {

DecisionRegions make_regions(int users, const PimaOptions& options)
{
    if (options.prior) {
        return map_boundaries(*options.prior, users, options.model.noise_power, options.model.samples);
    }
    return practical_thresholds(users, options.model.noise_power);
}

}  // namespace

PimaEngine::PimaEngine(int users, std::size_t buffer_capacity, PimaOptions options)
    : buffers_(users, buffer_capacity),
      options_(std::move(options)),
      regions_(make_regions(users, options_)),
      table_(users),
      committed_(static_cast<std::size_t>(users), 0),
      slot_users_(static_cast<std::size_t>(users))
{
    if (!(options_.pia_slots >= 0.0)) {
        throw ConfigError("pia_slots", "must be non-negative");
    }
}

FrameTrace PimaEngine::run_frame(ArrivalStream& arrivals, Rng& estimator_rng, Rng& scheduler_rng, EventSink& sink)
{
    const int users = buffers_.users();
    const double start = clock();
    buffers_.admit_until(arrivals, start, sink, /*batched=*/true);

    FrameTrace trace;
    trace.frame = frames_;
    trace.start = start;
    for (int k = 0; k < users; ++k) {
        committed_[static_cast<std::size_t>(k)] = buffers_[k].is_active() ? 1 : 0;
        trace.active += committed_[static_cast<std::size_t>(k)];
    }

    if (options_.perfect_estimation) {
        trace.estimate = trace.active;
    } else {
        const double power = sample_received_power(trace.active, options_.model, estimator_rng);
        trace.estimate = estimate_active(power, regions_);
    }

    const FrameSchedule schedule = build_schedule(trace.estimate, table_, scheduler_rng, options_.skip_empty_dt);
    trace.dt_slots = schedule.slots;
    for (int l = 0; l < schedule.slots; ++l) {
        slot_users_[static_cast<std::size_t>(l)].clear();
    }
    for (int k = 0; k < users; ++k) {
        const int slot = schedule.slot_of_user[static_cast<std::size_t>(k)];
        if (slot > 0 && committed_[static_cast<std::size_t>(k)]) {
            slot_users_[static_cast<std::size_t>(slot - 1)].push_back(k);
        }
    }

    // Packets generated during the frame stay outside the buffers until the
    // next frame start, so every transmission below is of a packet that was
    // queued at `start`, and each committed user is still active here.
    const double dt_start = start + options_.pia_slots;
    for (int l = 0; l < schedule.slots; ++l) {
        const auto& candidates = slot_users_[static_cast<std::size_t>(l)];
        const auto transmitters = candidates.size();
        if (transmitters == 1) {
            const int sender = candidates.front();
            sink.on_event(DeliveryEvent{buffers_[sender].pop_head(), dt_start + l, Outcome::delivered});
            ++trace.successes;
        } else if (transmitters == 0) {
            ++trace.idle;
        } else {
            ++trace.collisions;
        }
    }

    ++frames_;
    dt_slots_elapsed_ += static_cast<std::uint64_t>(schedule.slots);
    return trace;
}

// ---------------------------------------------------------------------------
// TDMA

TdmaEngine::TdmaEngine(int users, std::size_t buffer_capacity) : buffers_(users, buffer_capacity) {}

int TdmaEngine::run_frame(ArrivalStream& arrivals, EventSink& sink)
{
    int delivered = 0;
    for (int k = 0; k < buffers_.users(); ++k) {
        const double slot_start = static_cast<double>(slots_elapsed_);
        buffers_.admit_until(arrivals, slot_start, sink);
        if (buffers_[k].is_active()) {
            sink.on_event(DeliveryEvent{buffers_[k].pop_head(), slot_start, Outcome::delivered});
            ++delivered;
        }
        ++slots_elapsed_;
    }
    return delivered;
}

// ---------------------------------------------------------------------------
// Stabilized slotted ALOHA

double next_backlog_estimate(double backlog, double expected_arrivals, Feedback feedback, SalohaRule rule)
{
    static const double kCollisionStep = 1.0 / (std::numbers::e - 2.0);
    const bool increase = rule == SalohaRule::rivest ? feedback == Feedback::collision
                                                     : feedback != Feedback::success;
    if (increase) {
        return backlog + expected_arrivals + kCollisionStep;
    }
    return std::max(expected_arrivals, backlog + expected_arrivals - 1.0);
}

double transmit_probability(double backlog)
{
    return backlog < 1.0 ? 1.0 : 1.0 / backlog;
}

SalohaEngine::SalohaEngine(int users, std::size_t buffer_capacity, SalohaOptions options)
    : buffers_(users, buffer_capacity), options_(options)
{
}

SlotResult SalohaEngine::step(ArrivalStream& arrivals, Rng& access_rng, EventSink& sink)
{
    const double slot_start = static_cast<double>(slot_);
    buffers_.admit_until(arrivals, slot_start, sink);

    SlotResult result;
    result.backlog_estimate = backlog_;
    result.transmit_prob = options_.fixed_transmit_prob.value_or(transmit_probability(backlog_));

    int sender = -1;
    for (int k = 0; k < buffers_.users(); ++k) {
        if (!buffers_[k].is_active()) {
            continue;
        }
        if (result.transmit_prob >= 1.0 || access_rng.bernoulli(result.transmit_prob)) {
            ++result.transmitters;
            sender = k;
        }
    }
    if (result.transmitters == 1) {
        result.feedback = Feedback::success;
        sink.on_event(DeliveryEvent{buffers_[sender].pop_head(), slot_start, Outcome::delivered});
    } else {
        result.feedback = result.transmitters == 0 ? Feedback::idle : Feedback::collision;
    }

    const double expected_arrivals = buffers_.users() * options_.arrival_prob;
    backlog_ = next_backlog_estimate(backlog_, expected_arrivals, result.feedback, options_.rule);
    ++slot_;
    return result;
}

// ---------------------------------------------------------------------------
// Driver

Metrics run_protocol(const SimConfig& config, std::ostream* trace)
{
    config.validate();
    const double warmup = static_cast<double>(config.warmup_slots);
    const double end = warmup + static_cast<double>(config.horizon_slots);
    const auto capacity = static_cast<std::size_t>(config.buffer);

    Rng traffic_rng(config.seed, Stream::traffic);
    ArrivalStream arrivals(TrafficConfig{config.users, config.lambda_total}, end, traffic_rng);
    MetricsCollector collector(warmup, config.slot_duration_s());
    Metrics& m = collector.metrics();

    auto finish = [&](BufferBank& bank) {
        bank.admit_until(arrivals, end, collector, config.protocol == Protocol::pima);
        m.residual = bank.queued_counted(collector);
        return m;
    };

    switch (config.protocol) {
    case Protocol::pima: {
        PimaOptions options;
        options.model = PowerModel{config.noise_power, config.resolved_m1(), config.bandwidth_hz};
        options.pia_slots = config.pia_slots();
        options.perfect_estimation = config.perfect_estimation;
        options.skip_empty_dt = config.skip_empty_dt;
        PimaEngine engine(config.users, capacity, std::move(options));
        Rng estimator_rng(config.seed, Stream::estimator);
        Rng scheduler_rng(config.seed, Stream::scheduler);
        while (engine.clock() < end) {
            const FrameTrace t = engine.run_frame(arrivals, estimator_rng, scheduler_rng, collector);
            if (t.start >= warmup) {
                ++m.frames;
                m.estimate_error_sum += static_cast<std::uint64_t>(std::abs(t.active - t.estimate));
                m.dt_slots_sum += static_cast<std::uint64_t>(t.dt_slots);
            }
            if (trace != nullptr) {
                write_trace_line(*trace, t);
            }
        }
        return finish(engine.buffers());
    }
    case Protocol::tdma: {
        TdmaEngine engine(config.users, capacity);
        while (engine.clock() < end) {
            engine.run_frame(arrivals, collector);
        }
        return finish(engine.buffers());
    }
    case Protocol::saloha: {
        SalohaOptions options;
        options.rule = config.saloha_rule;
        options.arrival_prob = -std::expm1(-config.per_user_rate());
        SalohaEngine engine(config.users, capacity, options);
        Rng access_rng(config.seed, Stream::access);
        while (engine.clock() < end) {
            const SlotResult r = engine.step(arrivals, access_rng, collector);
            if (engine.clock() - 1.0 >= warmup) {
                ++m.access_slots;
                m.backlog_estimate_sum += r.backlog_estimate;
            }
        }
        return finish(engine.buffers());
    }
    }
    throw ConfigError("protocol", "unknown protocol");
}

}  // namespace pima
