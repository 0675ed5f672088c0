#include "pima/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "pima/special_functions.hpp"
#include "pima/traffic.hpp"

namespace pima {

DecisionRegions::DecisionRegions(std::vector<double> boundaries) : boundaries_(std::move(boundaries))
{
    if (boundaries_.empty()) {
        throw ConfigError("boundaries", "at least one boundary is required");
    }
    for (std::size_t i = 1; i < boundaries_.size(); ++i) {
        if (!(boundaries_[i] > boundaries_[i - 1])) {
            throw ConfigError("boundaries", "must be strictly increasing (index " + std::to_string(i) + ")");
        }
    }
}

ActivityPrior::ActivityPrior(std::vector<double> mass) : mass_(std::move(mass))
{
    if (mass_.size() < 2) {
        throw ConfigError("prior", "needs entries for b = 0..K with K >= 1");
    }
    double total = 0.0;
    for (double p : mass_) {
        if (!(p >= 0.0)) {
            throw ConfigError("prior", "entries must be non-negative");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ConfigError("prior", "must sum to 1");
    }
}

ActivityPrior ActivityPrior::uniform(int max_users)
{
    const auto n = static_cast<std::size_t>(max_users) + 1;
    return ActivityPrior(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ActivityPrior ActivityPrior::point_mass(int max_users, int at)
{
    std::vector<double> mass(static_cast<std::size_t>(max_users) + 1, 0.0);
    mass.at(static_cast<std::size_t>(at)) = 1.0;
    return ActivityPrior(std::move(mass));
}

ActivityPrior ActivityPrior::binomial(int max_users, double activation_prob)
{
    std::vector<double> mass(static_cast<std::size_t>(max_users) + 1);
    for (int b = 0; b <= max_users; ++b) {
        const double log_p = log_choose(max_users, b) + b * std::log(activation_prob)
                             + (max_users - b) * std::log1p(-activation_prob);
        mass[static_cast<std::size_t>(b)] = std::exp(log_p);
    }
    const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
    for (double& p : mass) {
        p /= total;
    }
    return ActivityPrior(std::move(mass));
}

double sample_received_power(int active, const PowerModel& model, Rng& rng)
{
    return rng.erlang(model.samples, model.mean(active));
}

double sample_received_power_symbols(int active, const PowerModel& model, Rng& rng)
{
    // CN(0, v) has independent N(0, v/2) real and imaginary parts.
    const double noise_sd = std::sqrt(model.noise_power / 2.0);
    const double user_sd = std::sqrt(0.5);
    double total = 0.0;
    for (std::uint64_t i = 0; i < model.samples; ++i) {
        double re = noise_sd * rng.normal();
        double im = noise_sd * rng.normal();
        for (int k = 0; k < active; ++k) {
            re += user_sd * rng.normal();
            im += user_sd * rng.normal();
        }
        total += re * re + im * im;
    }
    return total / static_cast<double>(model.samples);
}

DecisionRegions practical_thresholds(int max_users, double noise_power)
{
    if (max_users < 1) {
        throw ConfigError("users", "must be at least 1");
    }
    std::vector<double> eps(static_cast<std::size_t>(max_users));
    for (int b = 0; b < max_users; ++b) {
        eps[static_cast<std::size_t>(b)] = b + noise_power + 0.5;
    }
    return DecisionRegions(std::move(eps));
}

namespace {

// log(prior * N(x; mean, var)) up to the common -0.5 log(2 pi).
double log_weighted_density(double x, double mean, double var, double prior)
{
    const double d = x - mean;
    return std::log(prior) - 0.5 * std::log(var) - 0.5 * d * d / var;
}

}  // namespace

double gaussian_boundary(double mean_lo, double var_lo, double prior_lo, double mean_hi, double var_hi,
                         double prior_hi, int b)
{
    prior_lo = std::max(prior_lo, kPriorFloor);
    prior_hi = std::max(prior_hi, kPriorFloor);

    // (x - m_hi)^2 / v_hi - (x - m_lo)^2 / v_lo - 2 log(p_hi s_lo / (p_lo s_hi)) = 0
    const double a = 1.0 / var_hi - 1.0 / var_lo;
    const double bq = 2.0 * mean_lo / var_lo - 2.0 * mean_hi / var_hi;
    const double c = mean_hi * mean_hi / var_hi - mean_lo * mean_lo / var_lo
                     - std::log(prior_hi * prior_hi * var_lo / (prior_lo * prior_lo * var_hi));

    auto inside = [&](double x) { return x > mean_lo && x < mean_hi; };
    double root = std::numeric_limits<double>::quiet_NaN();
    const double scale = std::max(std::abs(1.0 / var_hi), std::abs(1.0 / var_lo));
    if (std::abs(a) <= 1e-14 * scale) {
        if (bq != 0.0 && inside(-c / bq)) {
            root = -c / bq;
        }
    } else {
        const double disc = bq * bq - 4.0 * a * c;
        if (disc >= 0.0) {
            const double q = -0.5 * (bq + std::copysign(std::sqrt(disc), bq));
            const double r1 = q / a;
            const double r2 = q != 0.0 ? c / q : r1;
            if (inside(r1)) {
                root = r1;
            } else if (inside(r2)) {
                root = r2;
            }
        }
    }
    if (std::isnan(root)) {
        throw DegeneratePriorError(b, "no decision boundary between the means for b = " + std::to_string(b));
    }

    // Newton polish on the log-density difference.
    for (int i = 0; i < 4; ++i) {
        const double g = log_weighted_density(root, mean_lo, var_lo, prior_lo)
                         - log_weighted_density(root, mean_hi, var_hi, prior_hi);
        const double dg = -(root - mean_lo) / var_lo + (root - mean_hi) / var_hi;
        if (dg == 0.0) {
            break;
        }
        const double next = root - g / dg;
        if (!inside(next)) {
            break;
        }
        root = next;
    }
    return root;
}

DecisionRegions map_boundaries(const ActivityPrior& prior, int max_users, double noise_power, std::uint64_t samples)
{
    if (prior.max_users() != max_users) {
        throw ConfigError("prior", "size must be K + 1");
    }
    if (samples < 1) {
        throw ConfigError("m1", "must be at least 1");
    }
    const PowerModel model{noise_power, samples, 1.0};
    std::vector<double> eps(static_cast<std::size_t>(max_users));
    for (int b = 0; b < max_users; ++b) {
        eps[static_cast<std::size_t>(b)] = gaussian_boundary(model.mean(b), model.variance(b), prior[b],
                                                             model.mean(b + 1), model.variance(b + 1),
                                                             prior[b + 1], b);
    }
    return DecisionRegions(std::move(eps));
}

int estimate_active(double power, const DecisionRegions& regions)
{
    const auto eps = regions.boundaries();
    return static_cast<int>(std::lower_bound(eps.begin(), eps.end(), power) - eps.begin());
}

double conditional_error_prob(int b, const DecisionRegions& regions, std::uint64_t samples, double noise_power)
{
    const int k = regions.max_users();
    if (b < 0 || b > k) {
        throw std::out_of_range("conditional_error_prob: b = " + std::to_string(b) + " outside 0..K");
    }
    const double mean = b + noise_power;
    const double root_m = std::sqrt(static_cast<double>(samples));
    double p = 0.0;
    if (b < k) {
        p += q_function(root_m * (regions.boundary(b) - mean) / mean);
    }
    if (b > 0) {
        p += q_function(root_m * (mean - regions.boundary(b - 1)) / mean);
    }
    return p;
}

double average_error_prob(const ActivityPrior& prior, const DecisionRegions& regions, std::uint64_t samples,
                          double noise_power)
{
    if (prior.max_users() != regions.max_users()) {
        throw ConfigError("prior", "size must match the decision regions");
    }
    double total = 0.0;
    for (int b = 0; b <= prior.max_users(); ++b) {
        total += prior[b] * conditional_error_prob(b, regions, samples, noise_power);
    }
    return total;
}

std::uint64_t required_samples(int max_users, double noise_power, double target_error)
{
    if (!(target_error > 0.0 && target_error < 1.0)) {
        throw ConfigError("pe_target", "must lie in (0, 1)");
    }
    const double root = 2.0 * (max_users + noise_power) * inverse_q(target_error / 2.0);
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(root * root)));
}

}  // namespace pima
