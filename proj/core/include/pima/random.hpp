#pragma once

#include <cstdint>
#include <random>

namespace pima {

/// Independent random streams used by one simulation replication.
///
/// Every replication owns one `Rng` per stream. Stream seeds are derived
/// from the replication seed with splitmix64, so adding a consumer to one
/// stream never perturbs the draws seen by another.
enum class Stream : std::uint64_t {
    traffic = 1,
    estimator = 2,
    scheduler = 3,
    access = 4,
    test = 99,
};

std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t derive_seed(std::uint64_t seed, Stream stream);

/// Seedable 64-bit generator (mt19937_64) with portable samplers.
///
/// The standard `<random>` distributions are implementation-defined, so
/// every sampler here is written against the raw 64-bit output to keep
/// runs bit-reproducible across standard libraries.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    Rng(std::uint64_t seed, Stream stream) : engine_(derive_seed(seed, stream)) {}

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    /// Uniform in (0, 1].
    double uniform_open_low() { return 1.0 - uniform(); }
    /// Uniform integer in [0, n); n > 0. Unbiased (rejection).
    std::uint64_t uniform_index(std::uint64_t n);
    bool bernoulli(double p) { return uniform() < p; }

    double exponential(double rate);
    double normal();
    /// Gamma(shape, scale=1), Marsaglia-Tsang.
    double gamma(double shape);
    /// Erlang with integer shape and the given mean.
    double erlang(std::uint64_t shape, double mean);

private:
    std::mt19937_64 engine_;
    bool has_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

}  // namespace pima
