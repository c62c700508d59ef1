#pragma once

namespace onebit {

/// Gaussian tail probability Q(x) = P(Z > x), Z ~ N(0, 1).
double q_function(double x) noexcept;

/// log Q(x), finite for every finite x. For x > 8 the value is formed from
/// the Laplace continued fraction of the Mills ratio, so it does not
/// underflow where erfc does.
double log_q(double x) noexcept;

}  // namespace onebit
