#include "pima/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "pima/protocols.hpp"

namespace pima {

Metrics run(const SimConfig& config)
{
    config.validate();
    return run_protocol(config);
}

Estimate summarize(const std::vector<double>& values)
{
    Estimate e;
    e.samples = values.size();
    if (values.empty()) {
        return e;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    e.mean = sum / static_cast<double>(values.size());
    if (values.size() < 2) {
        return e;
    }
    double ss = 0.0;
    for (double v : values) {
        ss += (v - e.mean) * (v - e.mean);
    }
    const auto n = static_cast<double>(values.size());
    const double sd = std::sqrt(ss / (n - 1.0));
    const boost::math::students_t dist(n - 1.0);
    e.ci95_half = boost::math::quantile(dist, 0.975) * sd / std::sqrt(n);
    return e;
}

const PointSummary& SweepResult::point(const std::string& curve, std::size_t load_index) const
{
    std::size_t seen = 0;
    for (const auto& p : points) {
        if (p.curve == curve && seen++ == load_index) {
            return p;
        }
    }
    throw std::out_of_range("no point " + std::to_string(load_index) + " for curve " + curve);
}

SweepResult sweep(const std::vector<Curve>& curves, const std::vector<double>& loads,
                  const std::vector<std::uint64_t>& seeds, unsigned threads)
{
    if (curves.empty() || loads.empty() || seeds.empty()) {
        throw ConfigError("sweep", "curves, loads and seeds must be non-empty");
    }
    SweepResult result;
    for (const auto& curve : curves) {
        for (double load : loads) {
            for (auto seed : seeds) {
                SimConfig c = curve.base;
                c.lambda_total = load;
                c.seed = seed;
                c.validate();
                result.cells.push_back(Cell{curve.name, c, {}});
            }
        }
    }

    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(result.cells.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < result.cells.size(); i = next++) {
            result.cells[i].metrics = run_protocol(result.cells[i].config);
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t) {
            pool.emplace_back(worker);
        }
        worker();
    }

    for (std::size_t first = 0; first < result.cells.size(); first += seeds.size()) {
        PointSummary p;
        p.curve = result.cells[first].curve;
        p.config = result.cells[first].config;
        p.seeds = seeds.size();
        std::vector<double> drops;
        std::vector<double> latencies;
        for (std::size_t i = first; i < first + seeds.size(); ++i) {
            const Metrics& m = result.cells[i].metrics;
            drops.push_back(m.drop_probability());
            if (auto lat = m.mean_latency_s()) {
                latencies.push_back(*lat);
            }
            p.generated += m.generated;
            p.delivered += m.delivered;
            p.dropped += m.dropped;
            p.residual += m.residual;
        }
        p.drop = summarize(drops);
        if (!latencies.empty()) {
            p.latency = summarize(latencies);
        }
        result.points.push_back(std::move(p));
    }
    return result;
}

std::vector<double> linear_grid(double first, double last, std::size_t count)
{
    if (count == 0) {
        return {};
    }
    if (count == 1) {
        return {first};
    }
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) {
        grid[i] = first + (last - first) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return grid;
}

std::vector<Curve> reference_curves(const SimConfig& base)
{
    SimConfig tdma = base;
    tdma.protocol = Protocol::tdma;
    SimConfig saloha = base;
    saloha.protocol = Protocol::saloha;
    SimConfig pima_long = base;
    pima_long.protocol = Protocol::pima;
    pima_long.m1.reset();
    pima_long.pe_target = 0.1;
    SimConfig pima_short = pima_long;
    pima_short.pe_target = 0.3;
    return {
        {"TDMA", tdma},
        {"SALOHA", saloha},
        {fmt::format("PIMA L1={:.0f}us", pima_long.pia_duration_s() * 1e6), pima_long},
        {fmt::format("PIMA L1={:.0f}us", pima_short.pia_duration_s() * 1e6), pima_short},
    };
}

std::string cell_csv_row(const SimConfig& c, const Metrics& m)
{
    const auto latency = m.mean_latency_s();
    return fmt::format("{},{},{},{},{},{},{},{},{},{},{}", to_string(c.protocol), c.users, c.lambda_total, c.buffer,
                       c.l1_us(), c.seed, m.generated, m.delivered, m.dropped, m.drop_probability(),
                       latency ? fmt::format("{}", *latency) : std::string{});
}

void write_cell_csv(std::ostream& out, const std::vector<Cell>& cells)
{
    out << kCellCsvHeader << '\n';
    for (const auto& cell : cells) {
        out << cell_csv_row(cell.config, cell.metrics) << '\n';
    }
}

void write_point_csv(std::ostream& out, const std::vector<PointSummary>& points, PointMetric metric)
{
    out << kPointCsvHeader << '\n';
    for (const auto& p : points) {
        const SimConfig& c = p.config;
        const std::string m1 = c.protocol == Protocol::pima ? std::to_string(c.resolved_m1()) : std::string{};
        std::string values = ",,,";
        const std::optional<Estimate> e = metric == PointMetric::drop ? std::optional<Estimate>(p.drop) : p.latency;
        if (e) {
            values = fmt::format("{},{},{},{}", e->mean, e->ci95_half, e->mean - e->ci95_half, e->mean + e->ci95_half);
        }
        out << fmt::format("{},{},{},{},{},{},{},{},{}\n", p.curve, to_string(c.protocol), c.users, c.lambda_total,
                           c.buffer, c.l1_us(), m1, p.seeds, values);
    }
}

std::string describe(const SimConfig& c)
{
    return fmt::format(
        "protocol={} users={} lambda_total={} buffer={} slot_us={} bandwidth_hz={} noise_power={} "
        "pe_target={} m1={} resolved_m1={} l1_us={} seed={} horizon_slots={} warmup_slots={} saloha_rule={} "
        "perfect_estimation={} skip_empty_dt={}",
        to_string(c.protocol), c.users, c.lambda_total, c.buffer, c.slot_us, c.bandwidth_hz, c.noise_power,
        c.pe_target ? fmt::format("{}", *c.pe_target) : "none", c.m1 ? fmt::format("{}", *c.m1) : "none",
        c.resolved_m1(), c.pia_duration_s() * 1e6, c.seed, c.horizon_slots, c.warmup_slots, to_string(c.saloha_rule),
        c.perfect_estimation, c.skip_empty_dt);
}

}  // namespace pima
