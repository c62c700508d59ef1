#pragma once

#include <cstddef>

#include "onebit/quadrature.hpp"
#include "onebit/signal_models.hpp"

namespace onebit {

enum class Receiver { OneBit, Ideal };

/// Fisher information of the hard-limited block about theta,
/// (gamma^2 / 2 pi) sum_n s'_n^2 exp(-gamma^2 s_n^2) / (Q(gamma s_n) Q(-gamma s_n)).
double fisher_onebit(const WaveformEval& eval, double gamma);

/// Fisher information of the unquantized block, gamma^2 |ds/dtheta|^2.
double fisher_ideal(const WaveformEval& eval, double gamma);

double fisher(const WaveformEval& eval, double gamma, Receiver receiver);

struct InfoReport {
  double fisher_onebit = 0.0;
  double fisher_ideal = 0.0;
  double chi = 0.0;  // fisher_onebit / fisher_ideal
};

InfoReport info_report(const WaveformEval& eval, double gamma);

inline constexpr std::size_t kDefaultHermiteNodes = 33;

/// E[F(theta)] for theta ~ dist by Gauss-Hermite quadrature.
double expected_fisher(const SampledWaveform& waveform, double gamma, const Gaussian& dist,
                       Receiver receiver, std::size_t nodes = kDefaultHermiteNodes);

/// Bayesian information of both receivers for one block with prior
/// information j_prior.
struct BayesReport {
  double fbar_onebit = 0.0;
  double fbar_ideal = 0.0;
  double j_prior = 0.0;
  double j_onebit = 0.0;  // fbar_onebit + j_prior
  double j_ideal = 0.0;   // fbar_ideal + j_prior
  double psi = 0.0;       // j_onebit / j_ideal
};

/// Throws std::domain_error when both J values are zero.
BayesReport bayes_report(double fbar_onebit, double fbar_ideal, double j_prior);

/// Spread of the 1-bit Fisher information of a delay waveform over `grid`
/// delays spanning one chip: max |F(theta) - mean| / mean. The ranging
/// bound treats F as delay-invariant when this is small.
double delay_invariance_deviation(const DelayWaveform& waveform, double gamma, std::size_t grid = 64);

}  // namespace onebit
