#include "onebit/quantized_channel.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "onebit/qfunction.hpp"
#include "onebit/rng.hpp"

namespace onebit {
namespace {

constexpr std::uint64_t kNoiseTag = 0x6e6f697365ULL;  // "noise"

}  // namespace

void sample_block_into(std::span<const double> s, double gamma, const NoiseModel& noise,
                       const StreamPosition& position, std::span<double> y, std::span<std::int8_t> r) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be non-negative");
  if (y.size() != s.size() || r.size() != s.size())
    throw std::invalid_argument("observation buffers must match the block length");
  CounterRng rng(derive_stream(noise.seed, {kNoiseTag, position.trial, position.realization, position.block}));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t n = 0; n < s.size(); ++n) {
    y[n] = gamma * s[n] + normal(rng);
    r[n] = hard_limit(y[n]);
  }
}

BlockObservation sample_block(const WaveformEval& eval, double gamma, const NoiseModel& noise,
                              const StreamPosition& position, bool keep_ideal) {
  std::vector<double> y(eval.size());
  BlockObservation obs;
  obs.onebit.resize(eval.size());
  sample_block_into(eval.s, gamma, noise, position, y, obs.onebit);
  if (keep_ideal) obs.ideal = std::move(y);
  return obs;
}

double loglik_onebit(std::span<const std::int8_t> r, const WaveformEval& eval, double gamma) {
  if (r.size() != eval.size()) throw std::invalid_argument("observation length does not match waveform");
  double sum = 0.0;
  for (std::size_t n = 0; n < r.size(); ++n) sum += log_q(-gamma * r[n] * eval.s[n]);
  return sum;
}

double loglik_ideal(std::span<const double> y, const WaveformEval& eval, double gamma) {
  if (y.size() != eval.size()) throw std::invalid_argument("observation length does not match waveform");
  double sq = 0.0;
  for (std::size_t n = 0; n < y.size(); ++n) {
    const double e = y[n] - gamma * eval.s[n];
    sq += e * e;
  }
  return -0.5 * static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi) - 0.5 * sq;
}

}  // namespace onebit
