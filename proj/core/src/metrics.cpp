#include "pima/metrics.hpp"

#include <cmath>

namespace pima {

void LatencyHistogram::add(double seconds)
{
    std::size_t bin = 0;
    if (seconds >= kLowest) {
        const double pos = std::floor(std::log10(seconds / kLowest) * kBinsPerDecade);
        bin = pos >= static_cast<double>(kBins - 2) ? kBins - 1 : static_cast<std::size_t>(pos) + 1;
    }
    ++counts_[bin];
}

double LatencyHistogram::lower_edge(std::size_t bin)
{
    if (bin == 0) {
        return 0.0;
    }
    return kLowest * std::pow(10.0, static_cast<double>(bin - 1) / kBinsPerDecade);
}

namespace {

std::optional<double> ratio(double num, std::uint64_t den)
{
    if (den == 0) {
        return std::nullopt;
    }
    return num / static_cast<double>(den);
}

}  // namespace

std::optional<double> Metrics::mean_estimate_error() const
{
    return ratio(static_cast<double>(estimate_error_sum), frames);
}

std::optional<double> Metrics::mean_dt_slots() const
{
    return ratio(static_cast<double>(dt_slots_sum), frames);
}

std::optional<double> Metrics::mean_backlog_estimate() const
{
    return ratio(backlog_estimate_sum, access_slots);
}

void MetricsCollector::on_generated(const Packet& p)
{
    if (counts(p)) {
        ++metrics_.generated;
    }
}

void MetricsCollector::on_event(const DeliveryEvent& event)
{
    if (!counts(event.packet)) {
        return;
    }
    if (event.outcome == Outcome::dropped) {
        ++metrics_.dropped;
        return;
    }
    ++metrics_.delivered;
    const double latency = (event.at - event.packet.gen_time) * slot_s_;
    metrics_.latency_sum_s += latency;
    metrics_.latency.add(latency);
}

}  // namespace pima
