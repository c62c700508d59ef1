#include "onebit/state_space.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "onebit/rng.hpp"

namespace onebit {

void StateSpaceModel::validate() const {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must satisfy 0 <= alpha < 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be positive");
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) throw std::invalid_argument("sigma0 must be positive");
  if (!std::isfinite(mu0)) throw std::invalid_argument("mu0 must be finite");
}

Gaussian marginal_moments(const StateSpaceModel& m, std::size_t k) {
  if (k == 0) return {m.mu0, m.sigma0 * m.sigma0};
  const double kk = static_cast<double>(k);
  if (m.alpha == 0.0) return {0.0, m.sigma * m.sigma};
  // alpha^{2k} and 1 - alpha^{2k} through log1p/expm1 so alpha = 1 - 1e-7 stays accurate
  const double log_alpha = std::log1p(-(1.0 - m.alpha));
  const double a2k = std::exp(2.0 * kk * log_alpha);
  const double one_minus_a2k = -std::expm1(2.0 * kk * log_alpha);
  const double geometric = one_minus_a2k / m.one_minus_alpha_sq();
  return {std::exp(kk * log_alpha) * m.mu0, a2k * m.sigma0 * m.sigma0 + geometric * m.sigma * m.sigma};
}

Gaussian stationary_moments(const StateSpaceModel& m) {
  return {0.0, m.sigma * m.sigma / m.one_minus_alpha_sq()};
}

std::vector<double> sample_trajectory(const StateSpaceModel& m, std::size_t blocks, std::uint64_t seed) {
  if (blocks < 1) throw std::invalid_argument("trajectory needs at least one block");
  CounterRng rng(derive_stream(seed, {0x7472616aULL}));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> theta(blocks + 1);
  theta[0] = m.mu0 + m.sigma0 * normal(rng);
  for (std::size_t k = 1; k <= blocks; ++k) theta[k] = m.alpha * theta[k - 1] + m.sigma * normal(rng);
  return theta;
}

double transition_logpdf(const StateSpaceModel& m, double theta_k, double theta_prev) {
  const double r = (theta_k - m.alpha * theta_prev) / m.sigma;
  return -0.5 * r * r - std::log(std::sqrt(2.0 * std::numbers::pi) * m.sigma);
}

}  // namespace onebit
