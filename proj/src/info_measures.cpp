#include "onebit/info_measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "onebit/qfunction.hpp"

namespace onebit {

double fisher_onebit(const WaveformEval& eval, double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be non-negative");
  double sum = 0.0;
  for (std::size_t n = 0; n < eval.size(); ++n) {
    const double ds = eval.ds_dtheta[n];
    if (ds == 0.0) continue;
    const double x = gamma * eval.s[n];
    // log-domain ratio survives |x| > 8 where Q(|x|) underflows
    const double log_ratio = -x * x - log_q(x) - log_q(-x);
    sum += ds * ds * std::exp(log_ratio);
  }
  return gamma * gamma / (2.0 * std::numbers::pi) * sum;
}

double fisher_ideal(const WaveformEval& eval, double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be non-negative");
  double sum = 0.0;
  for (double ds : eval.ds_dtheta) sum += ds * ds;
  return gamma * gamma * sum;
}

double fisher(const WaveformEval& eval, double gamma, Receiver receiver) {
  return receiver == Receiver::OneBit ? fisher_onebit(eval, gamma) : fisher_ideal(eval, gamma);
}

InfoReport info_report(const WaveformEval& eval, double gamma) {
  InfoReport r;
  r.fisher_onebit = fisher_onebit(eval, gamma);
  r.fisher_ideal = fisher_ideal(eval, gamma);
  r.chi = r.fisher_ideal > 0.0 ? r.fisher_onebit / r.fisher_ideal : 0.0;
  return r;
}

double expected_fisher(const SampledWaveform& waveform, double gamma, const Gaussian& dist,
                       Receiver receiver, std::size_t nodes) {
  if (!std::isfinite(dist.mean) || !std::isfinite(dist.variance) || dist.variance < 0.0)
    throw std::invalid_argument("expected_fisher needs finite moments and a non-negative variance");
  auto f = [&](double theta) { return fisher(evaluate(waveform, theta), gamma, receiver); };
  if (dist.variance == 0.0) return f(dist.mean);
  return gaussian_expectation(f, dist, gauss_hermite_rule(nodes));
}

BayesReport bayes_report(double fbar_onebit, double fbar_ideal, double j_prior) {
  if (fbar_onebit < 0.0 || fbar_ideal < 0.0 || j_prior < 0.0)
    throw std::invalid_argument("information values must be non-negative");
  BayesReport r;
  r.fbar_onebit = fbar_onebit;
  r.fbar_ideal = fbar_ideal;
  r.j_prior = j_prior;
  r.j_onebit = fbar_onebit + j_prior;
  r.j_ideal = fbar_ideal + j_prior;
  if (r.j_onebit == 0.0 && r.j_ideal == 0.0) throw std::domain_error("information ratio is undefined (0/0)");
  r.psi = r.j_onebit / r.j_ideal;
  return r;
}

double delay_invariance_deviation(const DelayWaveform& waveform, double gamma, std::size_t grid) {
  if (grid < 1) throw std::invalid_argument("grid must not be empty");
  const double chip = waveform.code().chip_duration;
  std::vector<double> values(grid);
  for (std::size_t i = 0; i < grid; ++i) {
    values[i] = fisher_onebit(waveform.eval(chip * static_cast<double>(i) / static_cast<double>(grid)), gamma);
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(grid);
  double worst = 0.0;
  for (double v : values) worst = std::max(worst, std::abs(v - mean) / mean);
  return worst;
}

}  // namespace onebit
