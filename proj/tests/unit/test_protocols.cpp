#include "pima/protocols.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <tuple>

#include <gtest/gtest.h>

namespace pima {
namespace {

constexpr int kUsers = 20;

PimaOptions perfect_options(double pia_slots = 0.1388)
{
    PimaOptions o;
    o.model = PowerModel{0.1, 1736, 1e8};
    o.pia_slots = pia_slots;
    o.perfect_estimation = true;
    return o;
}

struct Silence {
    Rng rng{0, Stream::traffic};
    ArrivalStream stream{TrafficConfig{kUsers, 0.0}, 1e12, rng};
};

// ---------------------------------------------------------------------------
// PIMA

TEST(PimaEngine, SingleActiveUserDeliversInFirstSlot)
{
    PimaEngine engine(kUsers, 3, perfect_options());
    Silence quiet;
    EventLog log;
    engine.buffers().admit(Packet{7, -0.5, 0}, log);
    Rng est(1, Stream::estimator);
    Rng sched(1, Stream::scheduler);
    const auto t = engine.run_frame(quiet.stream, est, sched, log);
    EXPECT_EQ(t.active, 1);
    EXPECT_EQ(t.estimate, 1);
    EXPECT_EQ(t.dt_slots, 1);
    EXPECT_EQ(t.successes, 1);
    ASSERT_EQ(log.events.size(), 1u);
    EXPECT_EQ(log.events[0].packet.owner, 7);
    EXPECT_DOUBLE_EQ(log.events[0].at, 0.1388);
    EXPECT_EQ(log.events[0].outcome, Outcome::delivered);
}

TEST(PimaEngine, NoisyEstimateOfSingleUserIsExact)
{
    auto options = perfect_options();
    options.perfect_estimation = false;
    PimaEngine engine(kUsers, 3, options);
    Silence quiet;
    EventLog log;
    Rng est(2, Stream::estimator);
    Rng sched(2, Stream::scheduler);
    for (int i = 0; i < 200; ++i) {
        engine.buffers().admit(Packet{i % kUsers, engine.clock() - 0.5, static_cast<std::uint64_t>(i)}, log);
        const auto t = engine.run_frame(quiet.stream, est, sched, log);
        EXPECT_EQ(t.estimate, 1);
        EXPECT_EQ(t.successes, 1);
    }
}

TEST(PimaEngine, AllUsersActiveNoCollisions)
{
    PimaEngine engine(kUsers, 3, perfect_options());
    Silence quiet;
    EventLog log;
    for (int k = 0; k < kUsers; ++k) {
        engine.buffers().admit(Packet{k, -1.0, 0}, log);
    }
    Rng est(3, Stream::estimator);
    Rng sched(3, Stream::scheduler);
    const auto t = engine.run_frame(quiet.stream, est, sched, log);
    EXPECT_EQ(t.dt_slots, 20);
    EXPECT_EQ(t.successes, 20);
    EXPECT_EQ(t.collisions, 0);
    EXPECT_EQ(log.events.size(), 20u);
    EXPECT_EQ(engine.buffers().queued(), 0u);
}

TEST(PimaEngine, EmptySystemUsesOneIdleSlot)
{
    PimaEngine engine(kUsers, 3, perfect_options(0.5));
    Silence quiet;
    EventLog log;
    Rng est(4, Stream::estimator);
    Rng sched(4, Stream::scheduler);
    const auto t = engine.run_frame(quiet.stream, est, sched, log);
    EXPECT_EQ(t.active, 0);
    EXPECT_EQ(t.dt_slots, 1);
    EXPECT_EQ(t.idle, 1);
    EXPECT_DOUBLE_EQ(engine.clock(), 1.5);
    EXPECT_TRUE(log.events.empty());
}

TEST(PimaEngine, SkipEmptyDtLeavesSensingOnly)
{
    auto options = perfect_options(0.5);
    options.skip_empty_dt = true;
    PimaEngine engine(kUsers, 3, options);
    Silence quiet;
    EventLog log;
    Rng est(4, Stream::estimator);
    Rng sched(4, Stream::scheduler);
    engine.run_frame(quiet.stream, est, sched, log);
    EXPECT_DOUBLE_EQ(engine.clock(), 0.5);
}

struct FrameRecord {
    FrameTrace trace;
    std::size_t first_event = 0;
    std::size_t end_event = 0;
};

struct PimaRun {
    PimaRun(double load, bool perfect, std::uint64_t seed, double horizon)
        : traffic(seed, Stream::traffic),
          stream(TrafficConfig{kUsers, load}, horizon, traffic),
          engine(kUsers, 3, [&] {
              auto o = perfect_options();
              o.perfect_estimation = perfect;
              return o;
          }()),
          est(seed, Stream::estimator),
          sched(seed, Stream::scheduler)
    {
        while (engine.clock() < horizon) {
            FrameRecord r;
            r.first_event = log.events.size();
            r.trace = engine.run_frame(stream, est, sched, log);
            r.end_event = log.events.size();
            frames.push_back(r);
        }
    }

    Rng traffic;
    ArrivalStream stream;
    PimaEngine engine;
    Rng est;
    Rng sched;
    EventLog log;
    std::vector<FrameRecord> frames;
};

TEST(PimaEngine, AtMostOnePacketPerUserPerFrame)
{
    const PimaRun run(0.7, false, 11, 2e5);
    const auto& log = run.log;
    const auto& frames = run.frames;
    for (const auto& f : frames) {
        std::map<int, int> per_user;
        for (std::size_t i = f.first_event; i < f.end_event; ++i) {
            if (log.events[i].outcome == Outcome::delivered) {
                ASSERT_EQ(++per_user[log.events[i].packet.owner], 1) << "frame " << f.trace.frame;
            }
        }
        EXPECT_EQ(static_cast<int>(per_user.size()), f.trace.successes);
    }
}

TEST(PimaEngine, PacketsGeneratedDuringFrameWaitForNextFrame)
{
    const PimaRun run(0.7, false, 12, 2e5);
    const auto& log = run.log;
    const auto& frames = run.frames;
    std::size_t checked = 0;
    for (const auto& f : frames) {
        for (std::size_t i = f.first_event; i < f.end_event; ++i) {
            const auto& e = log.events[i];
            if (e.outcome == Outcome::delivered) {
                ASSERT_LT(e.packet.gen_time, f.trace.start);
                ASSERT_GE(e.at, f.trace.start);
                ++checked;
            }
        }
    }
    EXPECT_GT(checked, 100000u);
}

TEST(PimaEngine, ClockEqualsSumOfFrameDurations)
{
    const PimaRun run(0.4, false, 13, 1e5);
    const auto& frames = run.frames;
    const auto* engine = &run.engine;
    long double total = 0.0L;
    std::uint64_t dt = 0;
    for (const auto& f : frames) {
        EXPECT_NEAR(static_cast<double>(total), f.trace.start, 1e-9 * (1.0 + f.trace.start));
        total += 0.1388L + f.trace.dt_slots;
        dt += static_cast<std::uint64_t>(f.trace.dt_slots);
    }
    EXPECT_EQ(engine->dt_slots_elapsed(), dt);
    EXPECT_EQ(engine->frames(), frames.size());
    EXPECT_NEAR(engine->clock(), static_cast<double>(total), 1e-9 * engine->clock());
    // Frame start is computed, not accumulated: exact decomposition.
    EXPECT_EQ(engine->clock(), static_cast<double>(dt) + static_cast<double>(frames.size()) * 0.1388);
}

TEST(PimaEngine, PerfectEstimationCollisionsOnlyFromSharing)
{
    const PimaRun run(0.5, true, 14, 1e5);
    const auto& frames = run.frames;
    for (const auto& f : frames) {
        EXPECT_EQ(f.trace.estimate, f.trace.active);
        EXPECT_EQ(f.trace.successes + f.trace.collisions + f.trace.idle, f.trace.dt_slots);
        EXPECT_LE(f.trace.successes + 2 * f.trace.collisions, f.trace.active);
    }
}

TEST(PimaEngine, TraceLinesAreJson)
{
    FrameTrace t{3, 12.5, 4, 5, 5, 2, 1, 2};
    std::ostringstream out;
    write_trace_line(out, t);
    EXPECT_EQ(out.str(),
              "{\"t\":3,\"start\":12.5,\"nu\":4,\"nu_hat\":5,\"L2\":5,\"successes\":2,"
              "\"collisions\":1,\"idle\":2}\n");
}

// ---------------------------------------------------------------------------
// TDMA

TEST(TdmaEngine, OwnerSlotDelivery)
{
    TdmaEngine engine(kUsers, 3);
    Silence quiet;
    EventLog log;
    engine.buffers().admit(Packet{2, -0.01, 0}, log);
    EXPECT_EQ(engine.run_frame(quiet.stream, log), 1);
    ASSERT_EQ(log.events.size(), 1u);
    EXPECT_DOUBLE_EQ(log.events[0].at, 2.0);
    EXPECT_DOUBLE_EQ(engine.clock(), 20.0);
}

TEST(TdmaEngine, InFrameEligibility)
{
    TdmaEngine engine(kUsers, 3);
    Rng rng(21, Stream::traffic);
    ArrivalStream arrivals(TrafficConfig{kUsers, 0.5}, 4e5, rng);
    EventLog log;
    while (engine.clock() < 4e5) {
        engine.run_frame(arrivals, log);
    }
    std::size_t same_frame = 0;
    for (const auto& e : log.events) {
        if (e.outcome != Outcome::delivered) {
            continue;
        }
        // Delivered exactly in the owner's slot.
        EXPECT_EQ(static_cast<long>(e.at) % kUsers, e.packet.owner);
        EXPECT_GE(e.at, e.packet.gen_time);
        if (std::floor(e.at / kUsers) == std::floor(e.packet.gen_time / kUsers)) {
            ++same_frame;
        }
    }
    EXPECT_GT(same_frame, 0u);
}

TEST(TdmaEngine, EmptySystemProducesNothing)
{
    TdmaEngine engine(kUsers, 3);
    Silence quiet;
    EventLog log;
    for (int f = 0; f < 1000; ++f) {
        EXPECT_EQ(engine.run_frame(quiet.stream, log), 0);
    }
    EXPECT_TRUE(log.events.empty());
}

TEST(TdmaEngine, LatencyBoundedByBufferDepth)
{
    constexpr int buffer = 3;
    TdmaEngine engine(kUsers, buffer);
    Rng rng(22, Stream::traffic);
    ArrivalStream arrivals(TrafficConfig{kUsers, 0.9}, 4e5, rng);
    EventLog log;
    while (engine.clock() < 4e5) {
        engine.run_frame(arrivals, log);
    }
    std::size_t delivered = 0;
    for (const auto& e : log.events) {
        if (e.outcome == Outcome::delivered) {
            ++delivered;
            EXPECT_LE(e.at - e.packet.gen_time, static_cast<double>(kUsers + buffer * kUsers));
        }
    }
    EXPECT_GT(delivered, 300000u);
}

// ---------------------------------------------------------------------------
// Slotted ALOHA

TEST(Saloha, BacklogUpdateExamples)
{
    const double step = 1.0 / (std::numbers::e - 2.0);
    EXPECT_NEAR(step, 1.39221, 1e-5);
    EXPECT_NEAR(next_backlog_estimate(2.0, 0.5, Feedback::collision, SalohaRule::merged), 3.89221, 1e-5);
    EXPECT_NEAR(next_backlog_estimate(2.0, 0.5, Feedback::idle, SalohaRule::merged), 3.89221, 1e-5);
    EXPECT_DOUBLE_EQ(next_backlog_estimate(2.0, 0.5, Feedback::success, SalohaRule::merged), 1.5);
    EXPECT_NEAR(next_backlog_estimate(2.0, 0.5, Feedback::collision, SalohaRule::rivest), 3.89221, 1e-5);
    EXPECT_DOUBLE_EQ(next_backlog_estimate(2.0, 0.5, Feedback::idle, SalohaRule::rivest), 1.5);
    EXPECT_DOUBLE_EQ(next_backlog_estimate(2.0, 0.5, Feedback::success, SalohaRule::rivest), 1.5);
    EXPECT_DOUBLE_EQ(next_backlog_estimate(0.2, 0.5, Feedback::success, SalohaRule::rivest), 0.5);
}

TEST(Saloha, TransmitProbabilityClamp)
{
    EXPECT_DOUBLE_EQ(transmit_probability(0.0), 1.0);
    EXPECT_DOUBLE_EQ(transmit_probability(0.4), 1.0);
    EXPECT_DOUBLE_EQ(transmit_probability(1.0), 1.0);
    EXPECT_DOUBLE_EQ(transmit_probability(4.0), 0.25);
}

TEST(Saloha, BacklogEstimateNeverNegative)
{
    for (auto rule : {SalohaRule::rivest, SalohaRule::merged}) {
        SalohaEngine engine(kUsers, 3, SalohaOptions{rule, -std::expm1(-0.02), std::nullopt});
        Rng traffic(31, Stream::traffic);
        ArrivalStream arrivals(TrafficConfig{kUsers, 0.4}, 1e5, traffic);
        Rng access(31, Stream::access);
        EventLog log;
        while (engine.clock() < 1e5) {
            const auto r = engine.step(arrivals, access, log);
            ASSERT_GE(r.backlog_estimate, 0.0);
            ASSERT_GT(r.transmit_prob, 0.0);
            ASSERT_LE(r.transmit_prob, 1.0);
        }
    }
}

TEST(Saloha, ForcedPersistenceDeadlocks)
{
    SalohaOptions options;
    options.fixed_transmit_prob = 1.0;
    SalohaEngine engine(kUsers, 3, options);
    Silence quiet;
    EventLog log;
    for (int i = 0; i < 3; ++i) {
        engine.buffers().admit(Packet{4, -1.0, static_cast<std::uint64_t>(i)}, log);
        engine.buffers().admit(Packet{9, -1.0, static_cast<std::uint64_t>(i)}, log);
    }
    Rng access(32, Stream::access);
    for (int s = 0; s < 10000; ++s) {
        const auto r = engine.step(quiet.stream, access, log);
        ASSERT_EQ(r.feedback, Feedback::collision);
        ASSERT_EQ(r.transmitters, 2);
    }
    EXPECT_TRUE(log.events.empty());
}

TEST(Saloha, LoneUserAlwaysSucceeds)
{
    SalohaEngine engine(kUsers, 3, SalohaOptions{});
    Silence quiet;
    EventLog log;
    engine.buffers().admit(Packet{0, -0.3, 0}, log);
    Rng access(33, Stream::access);
    const auto r = engine.step(quiet.stream, access, log);
    EXPECT_EQ(r.feedback, Feedback::success);
    ASSERT_EQ(log.events.size(), 1u);
    EXPECT_DOUBLE_EQ(log.events[0].at, 0.0);
}

// ---------------------------------------------------------------------------
// Driver

SimConfig small_config(Protocol p, double load)
{
    SimConfig c;
    c.protocol = p;
    c.lambda_total = load;
    c.horizon_slots = 100000;
    c.warmup_slots = 5000;
    return c;
}

TEST(RunProtocol, ZeroHorizonIsEmpty)
{
    for (auto p : {Protocol::pima, Protocol::tdma, Protocol::saloha}) {
        auto c = small_config(p, 0.5);
        c.horizon_slots = 0;
        c.warmup_slots = 0;
        const auto m = run_protocol(c);
        EXPECT_EQ(m.generated, 0u);
        EXPECT_EQ(m.delivered, 0u);
        EXPECT_EQ(m.dropped, 0u);
        EXPECT_FALSE(m.mean_latency_s().has_value());
    }
}

class Conservation : public ::testing::TestWithParam<std::tuple<Protocol, double, unsigned>> {};

TEST_P(Conservation, EveryPacketAccounted)
{
    auto c = small_config(std::get<0>(GetParam()), std::get<1>(GetParam()));
    c.seed = std::get<2>(GetParam());
    const auto m = run_protocol(c);
    EXPECT_TRUE(m.conserved()) << m.generated << ' ' << m.delivered << ' ' << m.dropped << ' ' << m.residual;
    EXPECT_GT(m.generated, 0u);
    EXPECT_GE(m.drop_probability(), 0.0);
    EXPECT_LE(m.drop_probability(), 1.0);
    std::uint64_t histogram_total = 0;
    for (auto n : m.latency.counts()) {
        histogram_total += n;
    }
    EXPECT_EQ(histogram_total, m.delivered);
}

INSTANTIATE_TEST_SUITE_P(Grid, Conservation,
                         ::testing::Combine(::testing::Values(Protocol::pima, Protocol::tdma, Protocol::saloha),
                                            ::testing::Values(0.01, 0.4, 0.7, 3.0),
                                            ::testing::Values(1u, 2u)),
                         [](const auto& info) {
                             const auto load = std::get<1>(info.param);
                             return std::string(to_string(std::get<0>(info.param))) + "_load" +
                                    std::to_string(static_cast<int>(std::lround(load * 100))) + "_seed" +
                                    std::to_string(std::get<2>(info.param));
                         });

TEST(RunProtocol, DeterministicPerSeed)
{
    for (auto p : {Protocol::pima, Protocol::tdma, Protocol::saloha}) {
        const auto c = small_config(p, 0.6);
        EXPECT_EQ(run_protocol(c), run_protocol(c));
        auto other = c;
        other.seed = 2;
        EXPECT_NE(run_protocol(c).generated, run_protocol(other).generated);
    }
}

TEST(RunProtocol, ExtrasArePopulated)
{
    const auto pima = run_protocol(small_config(Protocol::pima, 0.5));
    ASSERT_TRUE(pima.mean_dt_slots().has_value());
    EXPECT_GE(*pima.mean_dt_slots(), 1.0);
    ASSERT_TRUE(pima.mean_estimate_error().has_value());
    EXPECT_LT(*pima.mean_estimate_error(), 0.2);
    const auto aloha = run_protocol(small_config(Protocol::saloha, 0.5));
    ASSERT_TRUE(aloha.mean_backlog_estimate().has_value());
    EXPECT_GT(*aloha.mean_backlog_estimate(), 0.0);
    EXPECT_EQ(aloha.access_slots, 100000u);
}

TEST(RunProtocol, TraceHasOneLinePerFrame)
{
    auto c = small_config(Protocol::pima, 0.3);
    c.horizon_slots = 2000;
    c.warmup_slots = 0;
    std::ostringstream out;
    run_protocol(c, &out);
    const std::string text = out.str();
    const auto lines = std::count(text.begin(), text.end(), '\n');
    EXPECT_GT(lines, 100);
    EXPECT_EQ(text.rfind("{\"t\":0,", 0), 0u);
}

TEST(RunProtocol, NoisyEstimationCloseToPerfect)
{
    for (double pe : {0.1, 0.3}) {
        for (double load : {0.3167, 0.3933, 0.47, 0.5467, 0.6233, 0.7}) {
            SimConfig c;
            c.protocol = Protocol::pima;
            c.lambda_total = load;
            c.pe_target = pe;
            c.seed = 5;
            auto perfect = c;
            perfect.perfect_estimation = true;
            const double noisy_drop = run_protocol(c).drop_probability();
            const double perfect_drop = run_protocol(perfect).drop_probability();
            EXPECT_LE(noisy_drop, 1.25 * perfect_drop) << "pe " << pe << " load " << load;
        }
    }
}

}  // namespace
}  // namespace pima
