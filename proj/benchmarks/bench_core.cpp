#include <benchmark/benchmark.h>

#include "pima/estimator.hpp"
#include "pima/protocols.hpp"
#include "pima/scheduler.hpp"

namespace {

using namespace pima;

void BM_ReceivedPower(benchmark::State& state)
{
    const PowerModel model{0.1, static_cast<std::uint64_t>(state.range(0)), 1e8};
    Rng rng(1, Stream::estimator);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_received_power(10, model, rng));
    }
}
BENCHMARK(BM_ReceivedPower)->Arg(1736)->Arg(4373);

void BM_ReceivedPowerSymbols(benchmark::State& state)
{
    const PowerModel model{0.1, static_cast<std::uint64_t>(state.range(0)), 1e8};
    Rng rng(1, Stream::estimator);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_received_power_symbols(10, model, rng));
    }
}
BENCHMARK(BM_ReceivedPowerSymbols)->Arg(1736);

void BM_ScheduleTable(benchmark::State& state)
{
    const int users = static_cast<int>(state.range(0));
    for (auto _ : state) {
        ScheduleTable table(users);
        benchmark::DoNotOptimize(table.slots(users / 2));
    }
}
BENCHMARK(BM_ScheduleTable)->Arg(20)->Arg(64)->Arg(256);

void BM_BuildSchedule(benchmark::State& state)
{
    const ScheduleTable table(20);
    Rng rng(2, Stream::scheduler);
    const int estimate = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_schedule(estimate, table, rng));
    }
}
BENCHMARK(BM_BuildSchedule)->Arg(1)->Arg(5)->Arg(20);

void BM_Protocol(benchmark::State& state)
{
    SimConfig c;
    c.protocol = static_cast<Protocol>(state.range(0));
    c.lambda_total = 0.7;
    c.horizon_slots = 100'000;
    c.warmup_slots = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_protocol(c));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.horizon_slots));
    state.SetLabel(std::string(to_string(c.protocol)) + " slots");
}
BENCHMARK(BM_Protocol)
    ->Arg(static_cast<int>(Protocol::pima))
    ->Arg(static_cast<int>(Protocol::tdma))
    ->Arg(static_cast<int>(Protocol::saloha))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
