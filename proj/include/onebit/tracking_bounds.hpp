#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "onebit/state_space.hpp"

namespace onebit {

/// 10 log10(ratio).
double to_db(double ratio);

/// One step of the tracking-information recursion,
/// U_k = (sigma^2 + alpha^2 / U_{k-1})^{-1} + fbar_k.
double bound_step(const StateSpaceModel& m, double u_prev, double fbar);

/// The same step assembled from the transition information terms
/// D11 = alpha^2/sigma^2, D12 = D21 = -alpha/sigma^2, D22 = 1/sigma^2 + fbar:
/// U_k = D22 - D21 (U_{k-1} + D11)^{-1} D12.
double bound_step_information_form(const StateSpaceModel& m, double u_prev, double fbar);

/// U_0 .. U_K with U_0 = 1/sigma0^2; fbar_per_block[k-1] feeds block k.
std::vector<double> bound_recursion(const StateSpaceModel& m, std::span<const double> fbar_per_block);

/// Fixed point of bound_step for constant fbar.
double steady_state(const StateSpaceModel& m, double fbar);

/// Numerical form of the slow-evolution conditions; each entry is the
/// left/right ratio of a "<<" relation, declared satisfied at <= 0.01.
struct SlowEvolutionConditions {
  static constexpr double kMuchLess = 0.01;

  double alpha_close_to_one = 0.0;  // ((1-a^2)/(2 s^2))^2 / (a^2 F / s^2)
  double model_dominates = 0.0;     // (F/2)^2 / (a^2 F / s^2)
  double onebit_below_model = 0.0;  // F / (a^2 / s^2)
  double ideal_below_model = 0.0;   // F_inf / (a^2 / s^2)

  bool steady_approximation_valid() const noexcept {
    return alpha_close_to_one <= kMuchLess && model_dominates <= kMuchLess;
  }
  bool loss_approximation_valid() const noexcept {
    return onebit_below_model <= kMuchLess && ideal_below_model <= kMuchLess;
  }
};

SlowEvolutionConditions check_conditions(const StateSpaceModel& m, double fbar_onebit, double fbar_ideal);

/// Steady-state 1-bit loss together with its slow-evolution approximation.
struct SlowEvolutionLoss {
  double rho = 0.0;         // U / U_inf
  double rho_approx = 0.0;  // sqrt(fbar / fbar_inf)
  double gap_db = 0.0;      // to_db(rho) - to_db(rho_approx)
  SlowEvolutionConditions conditions;
};

SlowEvolutionLoss slow_evolution_loss(double fbar_onebit, double fbar_ideal, const StateSpaceModel& m);

struct BoundTrajectory {
  std::vector<double> u_onebit;  // U_k, k = 0..K
  std::vector<double> u_ideal;   // U_{inf,k}
  std::vector<double> rho;       // U_k / U_{inf,k}
  double steady_onebit = 0.0;
  double steady_ideal = 0.0;
  double rho_steady = 0.0;
};

/// Runs both recursions; the steady-state row uses the limiting fbar values.
BoundTrajectory bound_trajectory(const StateSpaceModel& m, std::span<const double> fbar_onebit,
                                 std::span<const double> fbar_ideal, double fbar_steady_onebit,
                                 double fbar_steady_ideal);

/// Blocks until |U_k - U| <= 10^-lambda |U_0 - U| for constant fbar.
std::size_t transient_duration(const StateSpaceModel& m, double fbar, double lambda,
                               std::size_t max_blocks = 100'000'000);

struct TransientReport {
  double lambda = 0.0;
  int nu = 1;  // order of convergence of the recursion
  double xi = 0.0;
  double xi_ideal = 0.0;
  std::size_t k_lambda = 0;        // from the recursion, 1-bit
  std::size_t k_lambda_ideal = 0;  // from the recursion, ideal
  double k_lambda_xi = 0.0;        // -lambda / log10(xi)
  double k_lambda_xi_ideal = 0.0;
  double k_lambda_slow = 0.0;      // lambda / (2 log10(sqrt(sigma^2 F) + alpha))
  double k_lambda_slow_ideal = 0.0;
  double delta = 0.0;              // k_lambda / k_lambda_ideal
  double delta_xi = 0.0;
  double delta_approx = 0.0;       // sqrt(fbar_ideal / fbar)
  SlowEvolutionConditions conditions;
};

/// Convergence rate xi = alpha^2 (sigma^2 U + alpha^2)^{-2} at the fixed point.
double convergence_factor(const StateSpaceModel& m, double fbar);

TransientReport transient_report(const StateSpaceModel& m, double fbar, double fbar_ideal, double lambda);

}  // namespace onebit
