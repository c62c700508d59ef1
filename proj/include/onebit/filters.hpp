#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "onebit/quadrature.hpp"
#include "onebit/rng.hpp"
#include "onebit/state_space.hpp"

namespace onebit {

enum class Resampler { Systematic, Multinomial };

struct ParticleFilterConfig {
  std::size_t particles = 100;
  double kappa = 0.66;  // resample when ESS <= kappa * particles
  Resampler resampler = Resampler::Systematic;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Weighted particle approximation of p(theta_k | r_1..r_k).
struct ParticleCloud {
  std::vector<double> particles;
  std::vector<double> weights;

  std::size_t size() const noexcept { return particles.size(); }
  /// 1 / sum w^2.
  double ess() const;
  /// sum w theta.
  double mean() const;
};

/// Every weight vanished, or a likelihood came back NaN. The Monte-Carlo
/// runner discards the trial.
class DegenerateCloudError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// L draws from N(prior.mean, prior.variance) with uniform weights.
ParticleCloud pf_init(const ParticleFilterConfig& config, const Gaussian& prior, CounterRng& rng);

/// theta^l <- alpha theta^l + z^l.
void pf_propagate(ParticleCloud& cloud, const StateSpaceModel& model, CounterRng& rng);

struct StepResult {
  double estimate = 0.0;  // weighted mean before resampling
  double ess = 0.0;       // before resampling
  bool resampled = false;
};

/// Multiplies the weights by exp(loglik), normalizes in the log domain,
/// forms the estimate and resamples when ESS <= kappa L.
StepResult pf_update(ParticleCloud& cloud, std::span<const double> loglik, const ParticleFilterConfig& config,
                     CounterRng& rng);

/// One SIR step with the transition prior as proposal. `loglik` is a batch
/// evaluator: loglik(particles, out) writes log p(r_k | theta^l) into out.
template <class BatchLoglik>
StepResult pf_step(ParticleCloud& cloud, const StateSpaceModel& model, BatchLoglik&& loglik,
                   const ParticleFilterConfig& config, CounterRng& rng) {
  pf_propagate(cloud, model, rng);
  std::vector<double> ll(cloud.size());
  loglik(std::span<const double>(cloud.particles), std::span<double>(ll));
  return pf_update(cloud, ll, config, rng);
}

/// Replaces the cloud with L equally weighted draws from its weights.
void resample_systematic(ParticleCloud& cloud, CounterRng& rng);
void resample_multinomial(ParticleCloud& cloud, CounterRng& rng);
void resample(ParticleCloud& cloud, Resampler scheme, CounterRng& rng);

struct KalmanState {
  double mean = 0.0;
  double variance = 1.0;
};

/// Exact posterior update for the linear model y = gamma theta x + eta,
/// eta ~ N(0, I), after the AR(1) prediction.
KalmanState kalman_step(const KalmanState& state, const StateSpaceModel& model, std::span<const double> y,
                        std::span<const double> pilot, double gamma);

}  // namespace onebit
