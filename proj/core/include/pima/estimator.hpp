#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "pima/random.hpp"

namespace pima {

/// Received-power model of the activity-sensing sub-frame.
///
/// Each active user is received with unit power; the receiver averages
/// `samples` (M1) power samples over a bandwidth `bandwidth_hz`, so the
/// sensing interval lasts M1 / W seconds.
struct PowerModel {
    double noise_power = 0.1;  // linear, relative to unit user power
    std::uint64_t samples = 1;
    double bandwidth_hz = 1e8;

    double duration_s() const { return static_cast<double>(samples) / bandwidth_hz; }
    double mean(int active) const { return active + noise_power; }
    double variance(int active) const
    {
        const double m = mean(active);
        return m * m / static_cast<double>(samples);
    }
};

/// Boundaries eps_0 < ... < eps_{K-1} splitting [0, inf) into K+1 regions.
/// Region b is (eps_{b-1}, eps_b]; region 0 starts at 0, region K is unbounded.
class DecisionRegions {
public:
    explicit DecisionRegions(std::vector<double> boundaries);

    int max_users() const noexcept { return static_cast<int>(boundaries_.size()); }
    std::span<const double> boundaries() const noexcept { return boundaries_; }
    double boundary(int b) const { return boundaries_.at(static_cast<std::size_t>(b)); }

private:
    std::vector<double> boundaries_;
};

/// Prior over the active count, p(b) for b = 0..K.
class ActivityPrior {
public:
    explicit ActivityPrior(std::vector<double> mass);
    static ActivityPrior uniform(int max_users);
    static ActivityPrior point_mass(int max_users, int at);
    static ActivityPrior binomial(int max_users, double activation_prob);

    int max_users() const noexcept { return static_cast<int>(mass_.size()) - 1; }
    double operator[](int b) const { return mass_.at(static_cast<std::size_t>(b)); }
    std::span<const double> mass() const noexcept { return mass_; }

private:
    std::vector<double> mass_;
};

class DegeneratePriorError : public std::runtime_error {
public:
    DegeneratePriorError(int b, const std::string& what) : std::runtime_error(what), b_(b) {}
    int boundary_index() const noexcept { return b_; }

private:
    int b_;
};

/// Prior entries below this value are floored before taking logarithms.
inline constexpr double kPriorFloor = 1e-12;

/// Draws the averaged received power for `active` transmitting users:
/// Erlang(shape M1) with mean active + noise_power.
double sample_received_power(int active, const PowerModel& model, Rng& rng);

/// Same law as sample_received_power, built from M1 explicit complex
/// Gaussian samples (noise plus one unit-power signal per user). Slow;
/// meant for validating the Erlang shortcut.
double sample_received_power_symbols(int active, const PowerModel& model, Rng& rng);

/// eps_b = b + noise + 1/2.
DecisionRegions practical_thresholds(int max_users, double noise_power);

/// Intersection of two prior-weighted Gaussian densities lying strictly
/// between the two means (mean_lo < mean_hi). Throws DegeneratePriorError
/// with index `b` when no such root exists.
double gaussian_boundary(double mean_lo, double var_lo, double prior_lo, double mean_hi, double var_hi,
                         double prior_hi, int b = 0);

/// MAP decision regions under the Gaussian approximation of the power.
DecisionRegions map_boundaries(const ActivityPrior& prior, int max_users, double noise_power,
                               std::uint64_t samples);

/// Region index containing `power`. A value equal to eps_b maps to b.
int estimate_active(double power, const DecisionRegions& regions);

/// P[estimate != b | b active] under the Gaussian approximation.
double conditional_error_prob(int b, const DecisionRegions& regions, std::uint64_t samples, double noise_power);

double average_error_prob(const ActivityPrior& prior, const DecisionRegions& regions, std::uint64_t samples,
                          double noise_power);

/// Smallest M1 whose worst-case (all K active) error under practical
/// thresholds does not exceed `target_error`.
std::uint64_t required_samples(int max_users, double noise_power, double target_error);

}  // namespace pima
