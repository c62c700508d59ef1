#include "onebit/likelihood.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "onebit/qfunction.hpp"
#include "onebit/quantized_channel.hpp"

namespace onebit {

namespace {

void check_batch(std::span<const double> thetas, std::span<double> out) {
  if (thetas.size() != out.size()) throw std::invalid_argument("output size must match the particle count");
  // locate() must not throw inside a parallel region
  for (double t : thetas)
    if (!std::isfinite(t)) throw std::invalid_argument("delay must be finite");
}

}  // namespace

void exact_loglik_onebit(const SampledWaveform& waveform, double gamma, std::span<const std::int8_t> r,
                         std::span<const double> thetas, std::span<double> out) {
  check_batch(thetas, out);
  for (std::size_t l = 0; l < thetas.size(); ++l) out[l] = loglik_onebit(r, evaluate(waveform, thetas[l]), gamma);
}

void exact_loglik_ideal(const SampledWaveform& waveform, double gamma, std::span<const double> y,
                        std::span<const double> thetas, std::span<double> out) {
  check_batch(thetas, out);
  for (std::size_t l = 0; l < thetas.size(); ++l) out[l] = loglik_ideal(y, evaluate(waveform, thetas[l]), gamma);
}

DelayLikelihoodTable::DelayLikelihoodTable(const DelayWaveform& waveform, double gamma, std::size_t phases)
    : n_(waveform.samples()), phases_(phases), gamma_(gamma), sample_period_(waveform.sample_period()) {
  if (phases < 1) throw std::invalid_argument("table needs at least one phase");
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be non-negative");
  const std::size_t rows = phases + 1;
  s_rows_.resize(rows * n_);
  h_rows_.resize(rows * n_);
  g_sums_.resize(rows);
  std::vector<double> s;
  for (std::size_t j = 0; j < rows; ++j) {
    waveform.eval_samples(sample_period_ * static_cast<double>(j) / static_cast<double>(phases), s);
    double g_sum = 0.0;
    for (std::size_t n = 0; n < n_; ++n) {
      const double x = gamma * s[n];
      const double lp = log_q(-x);
      const double lm = log_q(x);
      s_rows_[j * n_ + n] = s[n];
      h_rows_[j * n_ + n] = 0.5 * (lp - lm);
      g_sum += 0.5 * (lp + lm);
    }
    g_sums_[j] = g_sum;
  }
  norms_.resize(rows);
  cross_.resize(phases);
  for (std::size_t j = 0; j < rows; ++j) {
    const double* a = s_rows_.data() + j * n_;
    double nn = 0.0;
    double nc = 0.0;
    for (std::size_t n = 0; n < n_; ++n) {
      nn += a[n] * a[n];
      if (j < phases) nc += a[n] * a[n + n_];
    }
    norms_[j] = nn;
    if (j < phases) cross_[j] = nc;
  }
}

DelayLikelihoodTable::Locator DelayLikelihoodTable::locate(double theta) const {
  if (!std::isfinite(theta)) throw std::invalid_argument("delay must be finite");
  const double u = theta / sample_period_;
  const double q = std::floor(u);
  const double pos = (u - q) * static_cast<double>(phases_);
  double row = std::floor(pos);
  double weight = pos - row;
  if (row >= static_cast<double>(phases_)) {  // u - q rounded up to 1
    row = static_cast<double>(phases_ - 1);
    weight = 1.0;
  }
  const double nd = static_cast<double>(n_);
  double shift = std::fmod(q, nd);
  if (shift < 0.0) shift += nd;
  return {static_cast<std::size_t>(row), static_cast<std::size_t>(shift), weight};
}

namespace {

// sum_n a[n] b0[(n - q) mod N] and the same against b1
std::pair<double, double> circular_dots(const double* a, const double* b0, const double* b1, std::size_t n,
                                        std::size_t q) {
  double d0 = 0.0;
  double d1 = 0.0;
#pragma omp simd reduction(+ : d0, d1)
  for (std::size_t i = 0; i < q; ++i) {
    d0 += a[i] * b0[i + n - q];
    d1 += a[i] * b1[i + n - q];
  }
#pragma omp simd reduction(+ : d0, d1)
  for (std::size_t i = q; i < n; ++i) {
    d0 += a[i] * b0[i - q];
    d1 += a[i] * b1[i - q];
  }
  return {d0, d1};
}

}  // namespace

double DelayLikelihoodTable::onebit_terms(const double* r, double theta) const {
  const Locator loc = locate(theta);
  const double* h0 = h_rows_.data() + loc.row * n_;
  const auto [a0, a1] = circular_dots(r, h0, h0 + n_, n_, loc.shift);
  const double w = loc.weight;
  return (1.0 - w) * (g_sums_[loc.row] + a0) + w * (g_sums_[loc.row + 1] + a1);
}

double DelayLikelihoodTable::ideal_terms(const double* y, double y_sq, double theta) const {
  const Locator loc = locate(theta);
  const double* s0 = s_rows_.data() + loc.row * n_;
  const auto [d0, d1] = circular_dots(y, s0, s0 + n_, n_, loc.shift);
  const double w = loc.weight;
  const double v = 1.0 - w;
  const double dot = v * d0 + w * d1;
  // |v s0 + w s1|^2 from the stored row Gram entries
  const double ss = v * v * norms_[loc.row] + 2.0 * v * w * cross_[loc.row] + w * w * norms_[loc.row + 1];
  const double nd = static_cast<double>(n_);
  return -0.5 * nd * std::log(2.0 * std::numbers::pi) - 0.5 * y_sq + gamma_ * dot - 0.5 * gamma_ * gamma_ * ss;
}

double DelayLikelihoodTable::loglik_onebit(std::span<const std::int8_t> r, double theta) const {
  if (r.size() != n_) throw std::invalid_argument("observation length does not match the table");
  const std::vector<double> rd(r.begin(), r.end());
  return onebit_terms(rd.data(), theta);
}

double DelayLikelihoodTable::loglik_ideal(std::span<const double> y, double theta) const {
  if (y.size() != n_) throw std::invalid_argument("observation length does not match the table");
  double y_sq = 0.0;
  for (double v : y) y_sq += v * v;
  return ideal_terms(y.data(), y_sq, theta);
}

void DelayLikelihoodTable::batch_onebit(std::span<const std::int8_t> r, std::span<const double> thetas,
                                        std::span<double> out) const {
  check_batch(thetas, out);
  if (r.size() != n_) throw std::invalid_argument("observation length does not match the table");
  const std::vector<double> rd(r.begin(), r.end());
  const auto count = static_cast<std::ptrdiff_t>(thetas.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t l = 0; l < count; ++l) out[l] = onebit_terms(rd.data(), thetas[l]);
}

void DelayLikelihoodTable::batch_ideal(std::span<const double> y, std::span<const double> thetas,
                                       std::span<double> out) const {
  check_batch(thetas, out);
  if (y.size() != n_) throw std::invalid_argument("observation length does not match the table");
  double y_sq = 0.0;
  for (double v : y) y_sq += v * v;
  const auto count = static_cast<std::ptrdiff_t>(thetas.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t l = 0; l < count; ++l) out[l] = ideal_terms(y.data(), y_sq, thetas[l]);
}

GainLikelihood::GainLikelihood(std::vector<double> pilot, double gamma)
    : pilot_(std::move(pilot)), gamma_(gamma), pilot_sq_(0.0) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be non-negative");
  for (double x : pilot_) pilot_sq_ += x * x;
}

void GainLikelihood::batch_onebit(std::span<const std::int8_t> r, std::span<const double> thetas,
                                  std::span<double> out) const {
  check_batch(thetas, out);
  if (r.size() != pilot_.size()) throw std::invalid_argument("observation length does not match the pilot");
  const auto count = static_cast<std::ptrdiff_t>(thetas.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t l = 0; l < count; ++l) {
    const double a = gamma_ * thetas[l];
    double sum = 0.0;
    for (std::size_t n = 0; n < pilot_.size(); ++n) sum += log_q(-a * r[n] * pilot_[n]);
    out[l] = sum;
  }
}

void GainLikelihood::batch_ideal(std::span<const double> y, std::span<const double> thetas,
                                 std::span<double> out) const {
  check_batch(thetas, out);
  if (y.size() != pilot_.size()) throw std::invalid_argument("observation length does not match the pilot");
  double y_sq = 0.0;
  double xy = 0.0;
  for (std::size_t n = 0; n < y.size(); ++n) {
    y_sq += y[n] * y[n];
    xy += pilot_[n] * y[n];
  }
  const double base = -0.5 * static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi) - 0.5 * y_sq;
  const auto count = static_cast<std::ptrdiff_t>(thetas.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t l = 0; l < count; ++l) {
    const double a = gamma_ * thetas[l];
    out[l] = base + a * xy - 0.5 * a * a * pilot_sq_;
  }
}

}  // namespace onebit
