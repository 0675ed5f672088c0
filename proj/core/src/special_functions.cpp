#include "pima/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace pima {

double q_function(double x)
{
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double inverse_q(double p)
{
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("inverse_q: probability must lie in (0, 1)");
    }
    // Q is strictly decreasing; Q(-40) == 1 and Q(40) == 0 in double.
    double lo = -40.0;
    double hi = 40.0;
    double x = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double f = q_function(x) - p;
        if (f > 0.0) {
            lo = x;
        } else {
            hi = x;
        }
        const double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
        double next = density > 0.0 ? x + f / density : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        const double step = std::abs(next - x);
        x = next;
        if (step < 1e-12) {
            break;
        }
    }
    return x;
}

double log_choose(std::int64_t n, std::int64_t r)
{
    if (r < 0 || r > n) {
        return -std::numeric_limits<double>::infinity();
    }
    if (r == 0 || r == n) {
        return 0.0;
    }
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(r) + 1.0)
           - std::lgamma(static_cast<double>(n - r) + 1.0);
}

std::uint64_t choose_exact(std::int64_t n, std::int64_t r)
{
    if (n < 0 || n > 64) {
        throw std::domain_error("choose_exact: n must lie in [0, 64]");
    }
    if (r < 0 || r > n) {
        return 0;
    }
    if (r > n - r) {
        r = n - r;
    }
    // c * (n - i) is divisible by (i + 1); cancel the gcd first so the
    // product never exceeds the next coefficient.
    std::uint64_t c = 1;
    for (std::int64_t i = 0; i < r; ++i) {
        const auto den = static_cast<std::uint64_t>(i + 1);
        const std::uint64_t g = std::gcd(c, den);
        c = c / g * (static_cast<std::uint64_t>(n - i) / (den / g));
    }
    return c;
}

}  // namespace pima
