#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "onebit/quadrature.hpp"

namespace onebit {

/// AR(1) parameter evolution theta_k = alpha theta_{k-1} + z_k,
/// z_k ~ N(0, sigma^2), theta_0 ~ N(mu0, sigma0^2).
struct StateSpaceModel {
  double alpha = 0.0;
  double sigma = 1.0;
  double mu0 = 0.0;
  double sigma0 = 1.0;

  /// Throws std::invalid_argument unless 0 <= alpha < 1 and sigma, sigma0 > 0.
  void validate() const;
  /// 1 - alpha^2 without cancellation for alpha close to one.
  double one_minus_alpha_sq() const noexcept { return (1.0 - alpha) * (1.0 + alpha); }
};

/// Mean and variance of theta_k.
Gaussian marginal_moments(const StateSpaceModel& m, std::size_t k);

/// Limit of marginal_moments for k -> infinity: N(0, sigma^2 / (1 - alpha^2)).
Gaussian stationary_moments(const StateSpaceModel& m);

/// theta_0 .. theta_K, deterministic per seed.
std::vector<double> sample_trajectory(const StateSpaceModel& m, std::size_t blocks, std::uint64_t seed);

/// log N(theta_k; alpha theta_prev, sigma^2).
double transition_logpdf(const StateSpaceModel& m, double theta_k, double theta_prev);

}  // namespace onebit
