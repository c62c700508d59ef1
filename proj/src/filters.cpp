#include "onebit/filters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace onebit {

void ParticleFilterConfig::validate() const {
  if (particles < 2) throw std::invalid_argument("particle filter needs at least 2 particles");
  if (!(kappa > 0.0 && kappa <= 1.0)) throw std::invalid_argument("kappa must lie in (0, 1]");
}

double ParticleCloud::ess() const {
  double sq = 0.0;
  for (double w : weights) sq += w * w;
  return 1.0 / sq;
}

double ParticleCloud::mean() const {
  double m = 0.0;
  for (std::size_t l = 0; l < particles.size(); ++l) m += weights[l] * particles[l];
  return m;
}

ParticleCloud pf_init(const ParticleFilterConfig& config, const Gaussian& prior, CounterRng& rng) {
  config.validate();
  if (prior.variance < 0.0) throw std::invalid_argument("prior variance must be non-negative");
  const std::size_t n = config.particles;
  ParticleCloud cloud;
  cloud.particles.resize(n);
  cloud.weights.assign(n, 1.0 / static_cast<double>(n));
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd = std::sqrt(prior.variance);
  for (double& p : cloud.particles) p = prior.mean + sd * normal(rng);
  return cloud;
}

void pf_propagate(ParticleCloud& cloud, const StateSpaceModel& model, CounterRng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& p : cloud.particles) p = model.alpha * p + model.sigma * normal(rng);
}

StepResult pf_update(ParticleCloud& cloud, std::span<const double> loglik, const ParticleFilterConfig& config,
                     CounterRng& rng) {
  const std::size_t n = cloud.size();
  if (loglik.size() != n) throw std::invalid_argument("one log-likelihood per particle expected");
  std::vector<double> lw(n);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < n; ++l) {
    if (std::isnan(loglik[l])) throw DegenerateCloudError("log-likelihood is NaN");
    lw[l] = std::log(cloud.weights[l]) + loglik[l];
    top = std::max(top, lw[l]);
  }
  if (!std::isfinite(top)) throw DegenerateCloudError("all particle weights vanished");
  double total = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    cloud.weights[l] = std::exp(lw[l] - top);
    total += cloud.weights[l];
  }
  for (double& w : cloud.weights) w /= total;

  StepResult r;
  r.estimate = cloud.mean();
  r.ess = cloud.ess();
  if (r.ess <= config.kappa * static_cast<double>(n)) {
    resample(cloud, config.resampler, rng);
    r.resampled = true;
  }
  return r;
}

namespace {

// Picks particle indices for sorted positions u_0 < u_1 < ... in [0, 1).
template <class Positions>
void select(ParticleCloud& cloud, Positions&& position_at) {
  const std::size_t n = cloud.size();
  std::vector<double> out(n);
  double cum = cloud.weights[0];
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = position_at(i);
    while (u >= cum && j + 1 < n) cum += cloud.weights[++j];
    out[i] = cloud.particles[j];
  }
  cloud.particles = std::move(out);
  cloud.weights.assign(n, 1.0 / static_cast<double>(n));
}

}  // namespace

void resample_systematic(ParticleCloud& cloud, CounterRng& rng) {
  const double inv = 1.0 / static_cast<double>(cloud.size());
  const double u0 = rng.uniform() * inv;
  select(cloud, [&](std::size_t i) { return u0 + static_cast<double>(i) * inv; });
}

void resample_multinomial(ParticleCloud& cloud, CounterRng& rng) {
  // sorted uniforms from normalized exponential spacings
  const std::size_t n = cloud.size();
  std::vector<double> u(n + 1);
  double acc = 0.0;
  for (double& e : u) {
    acc += -std::log1p(-rng.uniform());
    e = acc;
  }
  select(cloud, [&](std::size_t i) { return u[i] / u[n]; });
}

void resample(ParticleCloud& cloud, Resampler scheme, CounterRng& rng) {
  if (scheme == Resampler::Systematic) {
    resample_systematic(cloud, rng);
  } else {
    resample_multinomial(cloud, rng);
  }
}

KalmanState kalman_step(const KalmanState& state, const StateSpaceModel& model, std::span<const double> y,
                        std::span<const double> pilot, double gamma) {
  if (!(state.variance > 0.0)) throw std::invalid_argument("Kalman variance must be positive");
  if (y.size() != pilot.size()) throw std::invalid_argument("observation and pilot lengths differ");
  const double pred_mean = model.alpha * state.mean;
  const double pred_var = model.alpha * model.alpha * state.variance + model.sigma * model.sigma;
  double xx = 0.0;
  double xy = 0.0;
  for (std::size_t n = 0; n < y.size(); ++n) {
    xx += pilot[n] * pilot[n];
    xy += pilot[n] * y[n];
  }
  KalmanState out;
  out.variance = 1.0 / (1.0 / pred_var + gamma * gamma * xx);
  out.mean = out.variance * (pred_mean / pred_var + gamma * xy);
  return out;
}

}  // namespace onebit
