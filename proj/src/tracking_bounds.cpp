#include "onebit/tracking_bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace onebit {

double to_db(double ratio) { return 10.0 * std::log10(ratio); }

double bound_step(const StateSpaceModel& m, double u_prev, double fbar) {
  return 1.0 / (m.sigma * m.sigma + m.alpha * m.alpha / u_prev) + fbar;
}

double bound_step_information_form(const StateSpaceModel& m, double u_prev, double fbar) {
  const double s2 = m.sigma * m.sigma;
  const double d11 = m.alpha * m.alpha / s2;
  const double d12 = -m.alpha / s2;
  const double d22 = 1.0 / s2 + fbar;
  return d22 - d12 * d12 / (u_prev + d11);
}

std::vector<double> bound_recursion(const StateSpaceModel& m, std::span<const double> fbar_per_block) {
  if (!(m.sigma0 > 0.0)) throw std::invalid_argument("sigma0 must be positive");
  std::vector<double> u(fbar_per_block.size() + 1);
  u[0] = 1.0 / (m.sigma0 * m.sigma0);
  for (std::size_t k = 1; k < u.size(); ++k) {
    if (fbar_per_block[k - 1] < 0.0) throw std::invalid_argument("Fisher information must be non-negative");
    u[k] = bound_step(m, u[k - 1], fbar_per_block[k - 1]);
  }
  return u;
}

double steady_state(const StateSpaceModel& m, double fbar) {
  if (fbar < 0.0) throw std::invalid_argument("Fisher information must be non-negative");
  const double s2 = m.sigma * m.sigma;
  const double a = m.one_minus_alpha_sq() / (2.0 * s2) + 0.5 * fbar;
  return a + std::sqrt(a * a + m.alpha * m.alpha * fbar / s2);
}

SlowEvolutionConditions check_conditions(const StateSpaceModel& m, double fbar_onebit, double fbar_ideal) {
  const double s2 = m.sigma * m.sigma;
  const double model_info = m.alpha * m.alpha / s2;
  const double cross = model_info * fbar_onebit;
  const double lead = m.one_minus_alpha_sq() / (2.0 * s2);
  SlowEvolutionConditions c;
  const double inf = std::numeric_limits<double>::infinity();
  c.alpha_close_to_one = cross > 0.0 ? lead * lead / cross : inf;
  c.model_dominates = cross > 0.0 ? 0.25 * fbar_onebit * fbar_onebit / cross : inf;
  c.onebit_below_model = model_info > 0.0 ? fbar_onebit / model_info : inf;
  c.ideal_below_model = model_info > 0.0 ? fbar_ideal / model_info : inf;
  return c;
}

SlowEvolutionLoss slow_evolution_loss(double fbar_onebit, double fbar_ideal, const StateSpaceModel& m) {
  if (!(fbar_onebit > 0.0) || !(fbar_ideal > 0.0))
    throw std::invalid_argument("both expected Fisher values must be positive");
  SlowEvolutionLoss r;
  r.rho = steady_state(m, fbar_onebit) / steady_state(m, fbar_ideal);
  r.rho_approx = std::sqrt(fbar_onebit / fbar_ideal);
  r.gap_db = to_db(r.rho) - to_db(r.rho_approx);
  r.conditions = check_conditions(m, fbar_onebit, fbar_ideal);
  return r;
}

BoundTrajectory bound_trajectory(const StateSpaceModel& m, std::span<const double> fbar_onebit,
                                 std::span<const double> fbar_ideal, double fbar_steady_onebit,
                                 double fbar_steady_ideal) {
  if (fbar_onebit.size() != fbar_ideal.size())
    throw std::invalid_argument("per-block Fisher sequences must have equal length");
  BoundTrajectory t;
  t.u_onebit = bound_recursion(m, fbar_onebit);
  t.u_ideal = bound_recursion(m, fbar_ideal);
  t.rho.resize(t.u_onebit.size());
  for (std::size_t k = 0; k < t.rho.size(); ++k) t.rho[k] = t.u_onebit[k] / t.u_ideal[k];
  t.steady_onebit = steady_state(m, fbar_steady_onebit);
  t.steady_ideal = steady_state(m, fbar_steady_ideal);
  t.rho_steady = t.steady_onebit / t.steady_ideal;
  return t;
}

std::size_t transient_duration(const StateSpaceModel& m, double fbar, double lambda, std::size_t max_blocks) {
  const double target = steady_state(m, fbar);
  double u = 1.0 / (m.sigma0 * m.sigma0);
  const double threshold = std::pow(10.0, -lambda) * std::abs(u - target);
  for (std::size_t k = 1; k <= max_blocks; ++k) {
    u = bound_step(m, u, fbar);
    if (std::abs(u - target) <= threshold) return k;
  }
  throw std::runtime_error("transient phase did not end within the block limit");
}

double convergence_factor(const StateSpaceModel& m, double fbar) {
  const double u = steady_state(m, fbar);
  const double d = m.sigma * m.sigma * u + m.alpha * m.alpha;
  return m.alpha * m.alpha / (d * d);
}

TransientReport transient_report(const StateSpaceModel& m, double fbar, double fbar_ideal, double lambda) {
  if (!(lambda > 1.0)) throw std::invalid_argument("transient quality lambda must exceed 1");
  if (!(fbar > 0.0) || !(fbar_ideal > 0.0)) throw std::invalid_argument("Fisher information must be positive");
  TransientReport r;
  r.lambda = lambda;
  r.xi = convergence_factor(m, fbar);
  r.xi_ideal = convergence_factor(m, fbar_ideal);
  r.k_lambda = transient_duration(m, fbar, lambda);
  r.k_lambda_ideal = transient_duration(m, fbar_ideal, lambda);
  r.k_lambda_xi = -lambda / std::log10(r.xi);
  r.k_lambda_xi_ideal = -lambda / std::log10(r.xi_ideal);
  const double s = m.sigma;
  r.k_lambda_slow = lambda / (2.0 * std::log10(std::sqrt(s * s * fbar) + m.alpha));
  r.k_lambda_slow_ideal = lambda / (2.0 * std::log10(std::sqrt(s * s * fbar_ideal) + m.alpha));
  r.delta = static_cast<double>(r.k_lambda) / static_cast<double>(r.k_lambda_ideal);
  r.delta_xi = r.k_lambda_xi / r.k_lambda_xi_ideal;
  r.delta_approx = std::sqrt(fbar_ideal / fbar);
  r.conditions = check_conditions(m, fbar, fbar_ideal);
  return r;
}

}  // namespace onebit
