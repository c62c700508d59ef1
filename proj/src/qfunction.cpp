#include "onebit/qfunction.hpp"

#include <cmath>
#include <numbers>

namespace onebit {
namespace {

constexpr double kTailSwitch = 8.0;

// Mills ratio R(x) = Q(x)/phi(x) for x > 0 via the Laplace continued fraction
//   R(x) = 1/(x + 1/(x + 2/(x + 3/(x + ...)))),
// evaluated with the modified Lentz algorithm.
double mills_ratio(double x) noexcept {
  constexpr double tiny = 1e-300;
  double f = x;
  double c = x;
  double d = 0.0;
  for (int k = 1; k < 500; ++k) {
    d = x + k * d;
    if (d == 0.0) d = tiny;
    c = x + k / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return 1.0 / f;
}

}  // namespace

double q_function(double x) noexcept {
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double log_q(double x) noexcept {
  if (x > kTailSwitch) {
    const double log_phi = -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi);
    return log_phi + std::log(mills_ratio(x));
  }
  if (x < 0.0) {
    // Q(x) = 1 - Q(-x) with Q(-x) < 1/2
    return std::log1p(-q_function(-x));
  }
  return std::log(q_function(x));
}

}  // namespace onebit
