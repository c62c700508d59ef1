#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "onebit/info_measures.hpp"
#include "onebit/signal_models.hpp"

namespace onebit {

/// Serial reference: evaluates the waveform at every particle and sums the
/// exact per-sample log-likelihoods.
void exact_loglik_onebit(const SampledWaveform& waveform, double gamma, std::span<const std::int8_t> r,
                         std::span<const double> thetas, std::span<double> out);
void exact_loglik_ideal(const SampledWaveform& waveform, double gamma, std::span<const double> y,
                        std::span<const double> thetas, std::span<double> out);

/// Delay log-likelihoods from a table of the waveform at `phases` sub-sample
/// delays. A delay theta = (q + f) T_s reads row f circularly shifted by q;
/// values between rows are interpolated linearly.
///
/// For the hard-limited receiver the per-sample term is split as
/// log Q(-gamma r s) = g(s) + r h(s) with g even and h odd in s, so a row
/// contributes sum_n g (shift invariant, stored once) plus a signed sum of h.
class DelayLikelihoodTable {
 public:
  DelayLikelihoodTable(const DelayWaveform& waveform, double gamma, std::size_t phases = 256);

  double loglik_onebit(std::span<const std::int8_t> r, double theta) const;
  double loglik_ideal(std::span<const double> y, double theta) const;

  /// Particle batches, parallel over particles with OpenMP.
  void batch_onebit(std::span<const std::int8_t> r, std::span<const double> thetas, std::span<double> out) const;
  void batch_ideal(std::span<const double> y, std::span<const double> thetas, std::span<double> out) const;

  std::size_t samples() const noexcept { return n_; }
  std::size_t phases() const noexcept { return phases_; }
  double gamma() const noexcept { return gamma_; }

 private:
  struct Locator {
    std::size_t row;
    std::size_t shift;  // q mod N
    double weight;      // interpolation weight of row + 1
  };
  Locator locate(double theta) const;
  double onebit_terms(const double* r, double theta) const;
  double ideal_terms(const double* y, double y_sq, double theta) const;

  std::size_t n_;
  std::size_t phases_;
  double gamma_;
  double sample_period_;
  // (phases + 1) rows of length N; row `phases` is row 0 delayed by one sample.
  std::vector<double> s_rows_;
  std::vector<double> h_rows_;
  std::vector<double> g_sums_;
  std::vector<double> norms_;  // |row j|^2
  std::vector<double> cross_;  // <row j, row j+1>
};

/// Log-likelihoods of the gain model s = theta x for particle batches,
/// parallel over particles with OpenMP.
class GainLikelihood {
 public:
  GainLikelihood(std::vector<double> pilot, double gamma);

  void batch_onebit(std::span<const std::int8_t> r, std::span<const double> thetas, std::span<double> out) const;
  void batch_ideal(std::span<const double> y, std::span<const double> thetas, std::span<double> out) const;

 private:
  std::vector<double> pilot_;
  double gamma_;
  double pilot_sq_;
};

}  // namespace onebit
