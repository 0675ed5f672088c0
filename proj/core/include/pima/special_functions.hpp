#pragma once

#include <cstdint>

namespace pima {

/// Standard normal upper-tail probability, Q(x) = P[N(0,1) > x].
double q_function(double x);

/// Inverse of q_function on (0, 1). Newton iterations safeguarded by a
/// bisection bracket; converges to |dx| < 1e-12.
double inverse_q(double p);

/// log C(n, r) via lgamma; -infinity when r < 0 or r > n.
double log_choose(std::int64_t n, std::int64_t r);

/// Exact C(n, r) for 0 <= n <= 64; 0 when r < 0 or r > n.
std::uint64_t choose_exact(std::int64_t n, std::int64_t r);

}  // namespace pima
