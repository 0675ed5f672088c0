#include "pima/traffic.hpp"

namespace pima {

UserBuffer::UserBuffer(std::size_t capacity) : capacity_(capacity)
{
    if (capacity == 0) {
        throw ConfigError("buffer", "capacity must be at least 1");
    }
}

std::optional<Packet> UserBuffer::push(const Packet& pkt)
{
    std::optional<Packet> evicted;
    if (queue_.size() == capacity_) {
        evicted = queue_.front();
        queue_.pop_front();
        ++dropped_;
    }
    queue_.push_back(pkt);
    return evicted;
}

Packet UserBuffer::pop_head()
{
    if (queue_.empty()) {
        throw std::logic_error("pop_head on an empty buffer");
    }
    Packet p = queue_.front();
    queue_.pop_front();
    return p;
}

const Packet& UserBuffer::head() const
{
    if (queue_.empty()) {
        throw std::logic_error("head of an empty buffer");
    }
    return queue_.front();
}

std::vector<double> generate_arrivals(double rate, double duration, Rng& rng)
{
    if (!(rate >= 0.0)) {
        throw ConfigError("rate", "must be non-negative");
    }
    if (!(duration > 0.0)) {
        throw ConfigError("duration", "must be positive");
    }
    std::vector<double> times;
    if (rate == 0.0) {
        return times;
    }
    times.reserve(static_cast<std::size_t>(rate * duration * 1.1) + 16);
    for (double t = rng.exponential(rate); t < duration; t += rng.exponential(rate)) {
        times.push_back(t);
    }
    return times;
}

ArrivalStream::ArrivalStream(const TrafficConfig& config, double end_time, Rng& rng)
    : config_(config), end_time_(end_time), rng_(&rng), seq_(static_cast<std::size_t>(config.users), 0)
{
    if (config.users < 1) {
        throw ConfigError("users", "must be at least 1");
    }
    if (!(config.total_rate >= 0.0)) {
        throw ConfigError("lambda_total", "must be non-negative");
    }
    advance();
}

Packet ArrivalStream::pop()
{
    Packet p = *next_;
    ++emitted_;
    advance();
    return p;
}

void ArrivalStream::advance()
{
    next_.reset();
    if (config_.total_rate <= 0.0) {
        return;
    }
    clock_ += rng_->exponential(config_.total_rate);
    if (clock_ >= end_time_) {
        return;
    }
    const auto owner = static_cast<int>(rng_->uniform_index(static_cast<std::uint64_t>(config_.users)));
    next_ = Packet{owner, clock_, seq_[static_cast<std::size_t>(owner)]++};
}

}  // namespace pima
