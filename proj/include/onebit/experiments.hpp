#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "onebit/filters.hpp"
#include "onebit/info_measures.hpp"
#include "onebit/signal_models.hpp"
#include "onebit/state_space.hpp"
#include "onebit/tracking_bounds.hpp"

namespace onebit {

/// Units for reporting theta. Delay scenarios hold theta internally in
/// seconds; gain scenarios are dimensionless (Native).
enum class Unit { Chips, Seconds, Meters, Native };

Unit parse_unit(const std::string& text);
std::string unit_name(Unit unit);

struct Scenario {
  std::string name;
  SampledWaveform waveform = LinearWaveform({1.0});
  double snr_db = 0.0;
  double gamma = 1.0;
  StateSpaceModel state;  // internal units
  std::size_t blocks = 1;
  ParticleFilterConfig filter;
  double chip_duration = 0.0;  // seconds; delay scenarios only
  Unit report_unit = Unit::Native;

  bool is_delay() const noexcept { return std::holds_alternative<DelayWaveform>(waveform); }
  void validate() const;
};

/// Overrides applied on top of a built-in scenario. `sigma` is given in the
/// scenario's configuration unit (chips for delay scenarios). For gain
/// scenarios an SNR or alpha override re-derives sigma = sqrt((1-a^2) SNR)
/// and mu0 = sqrt(SNR) unless sigma is set explicitly.
struct ScenarioParams {
  std::optional<double> snr_db;
  std::optional<double> alpha;
  std::optional<double> sigma;
  std::optional<std::size_t> blocks;
  std::optional<std::size_t> particles;
  std::optional<double> kappa;
};

/// "ranging", "uwb" or "mobile"; throws std::invalid_argument otherwise.
Scenario build_scenario(const std::string& name, const ScenarioParams& params = {});
Scenario builtin_scenario(const std::string& name);

/// Converts a length (delay, RMSE) between units; chips need the chip duration.
double convert_length(double value, Unit from, Unit to, double chip_duration);
/// Internal theta units of the scenario -> `unit`.
double to_report_unit(double value, const Scenario& sc, Unit unit);

/// F-bar sequences feeding the recursion for blocks 1..K and the limiting values.
struct FisherSchedule {
  std::vector<double> onebit;
  std::vector<double> ideal;
  double steady_onebit = 0.0;
  double steady_ideal = 0.0;
};

/// Delay scenarios evaluate F at the block marginal mean (the 1-bit
/// information is nearly delay invariant); gain scenarios average F over the
/// block marginal by Gauss-Hermite quadrature. Steady values use the
/// stationary marginal.
FisherSchedule fisher_schedule(const Scenario& sc, std::size_t blocks);

/// Bound trajectory in internal units (U in 1 / unit^2).
BoundTrajectory run_bounds(const Scenario& sc);

/// Fisher information and loss at theta = mu0 (internal units).
InfoReport scenario_fisher(const Scenario& sc);
/// Block Bayesian loss with theta ~ stationary marginal, J_p = (1 - a^2)/s^2.
BayesReport scenario_bayes(const Scenario& sc);
TransientReport scenario_transient(const Scenario& sc, double lambda);

struct BlockStats {
  std::size_t k = 0;
  double rmse_onebit = 0.0;
  double rmse_ideal = 0.0;
  double bound_onebit = 0.0;  // U_k^{-1/2}
  double bound_ideal = 0.0;
  double rho_db = 0.0;
};

struct MonteCarloResult {
  std::vector<BlockStats> per_block;  // k = 0..K, report unit
  std::size_t processes = 0;
  std::size_t realizations = 0;
  std::size_t discarded = 0;
  Unit unit = Unit::Native;
};

struct MonteCarloOptions {
  std::size_t processes = 20;
  std::size_t realizations = 50;
  std::uint64_t seed = 1;
  int workers = 0;  // 0: OpenMP default
  /// Exact waveform evaluation per particle instead of the phase table
  /// (delay scenarios).
  bool exact_likelihood = false;
  std::optional<Unit> unit;  // defaults to the scenario's report unit
};

/// P theta processes x R noise realizations; both receivers filter the same
/// noise. Trials are reduced in index order, so the result does not depend
/// on the worker count.
MonteCarloResult run_montecarlo(const Scenario& sc, const MonteCarloOptions& options);

/// sqrt(sum MSE_k / sum U_k^{-1}) over the last `window` blocks.
struct EfficiencyRatio {
  double onebit = 0.0;
  double ideal = 0.0;
};
EfficiencyRatio steady_efficiency(const MonteCarloResult& result, std::size_t window);

struct SweepRow {
  double beta = 0.0;
  double rho_db = 0.0;
  double psi_db = 0.0;
};

/// Steady-state tracking loss and block Bayesian loss against beta = 1 - a,
/// with sigma = sqrt((1 - a^2) SNR). Gain scenarios only.
std::vector<SweepRow> sweep_beta(const Scenario& base, std::span<const double> betas);

/// n points log-spaced over [beta_min, beta_max].
std::vector<double> log_grid(double beta_min, double beta_max, std::size_t points);

struct FiniteLossRow {
  double beta = 0.0;
  std::size_t k = 0;
  double rho_k_db = 0.0;
};

/// rho_k for k = 0..K per beta. Gain scenarios only.
std::vector<FiniteLossRow> finite_k_loss(const Scenario& base, std::span<const double> betas, std::size_t blocks);

}  // namespace onebit
