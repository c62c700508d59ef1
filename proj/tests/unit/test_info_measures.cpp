#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "onebit/experiments.hpp"
#include "onebit/info_measures.hpp"
#include "onebit/qfunction.hpp"
#include "onebit/quantized_channel.hpp"

using namespace onebit;

namespace {

constexpr double kTwoOverPi = 2.0 / std::numbers::pi;

// F(theta) = sum_r p(r) (d/dtheta log p(r))^2 over all 2^N patterns, with the
// score taken from the per-sample densities Q(-gamma r s).
double brute_force_fisher(const WaveformEval& e, double gamma) {
  const std::size_t n = e.size();
  double f = 0.0;
  for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits) {
    double logp = 0.0;
    double score = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = (bits >> i) & 1 ? -1.0 : 1.0;
      const double x = gamma * e.s[i];
      const double lq = log_q(-r * x);
      logp += lq;
      const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
      score += r * gamma * e.ds_dtheta[i] * pdf / std::exp(lq);
    }
    f += std::exp(logp) * score * score;
  }
  return f;
}

}  // namespace

TEST(Fisher, MatchesExhaustiveEnumeration) {
  std::mt19937_64 gen(2718);
  std::uniform_int_distribution<std::size_t> len(1, 10);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> log_gamma(-2.0, 0.7);
  for (int trial = 0; trial < 50; ++trial) {
    WaveformEval e;
    const std::size_t n = len(gen);
    for (std::size_t i = 0; i < n; ++i) {
      e.s.push_back(normal(gen));
      e.ds_dtheta.push_back(normal(gen));
    }
    const double gamma = std::pow(10.0, log_gamma(gen));
    const double closed = fisher_onebit(e, gamma);
    const double brute = brute_force_fisher(e, gamma);
    EXPECT_NEAR(closed, brute, 1e-6 * brute) << "trial " << trial;
    EXPECT_LE(closed, fisher_ideal(e, gamma) * (1.0 + 1e-12));
  }
}

TEST(Fisher, ScoreFromFiniteDifferencesOfTheLikelihood) {
  // enumeration again, but the score comes from differentiating log p(r | theta)
  // of a real waveform numerically
  CodeSequence code = generate_gps_ca_code(5);
  code.symbols.resize(5);
  const DelayWaveform w(code, Pulse{}, kGpsChipRate, 10);
  const double gamma = 0.8;
  const double theta = 0.37 * code.chip_duration;
  const double h = 1e-6 * code.chip_duration;
  const WaveformEval e = w.eval(theta);
  const WaveformEval hi = w.eval(theta + h);
  const WaveformEval lo = w.eval(theta - h);
  double f = 0.0;
  for (std::size_t bits = 0; bits < 1024; ++bits) {
    std::vector<std::int8_t> r(10);
    for (std::size_t i = 0; i < 10; ++i) r[i] = (bits >> i) & 1 ? -1 : 1;
    const double score = (loglik_onebit(r, hi, gamma) - loglik_onebit(r, lo, gamma)) / (2.0 * h);
    f += std::exp(loglik_onebit(r, e, gamma)) * score * score;
  }
  EXPECT_NEAR(fisher_onebit(e, gamma), f, 1e-6 * f);
}

TEST(Fisher, LowSnrLossIsTwoOverPi) {
  for (const char* name : {"ranging", "uwb"}) {
    Scenario sc = builtin_scenario(name);
    const WaveformEval e = evaluate(sc.waveform, sc.state.mu0);
    EXPECT_NEAR(info_report(e, 1e-3).chi, kTwoOverPi, 1e-4) << name;
  }
}

TEST(Fisher, IdealIsGammaSquaredGradientNorm) {
  const WaveformEval e{{0.0, 0.0}, {3.0, 4.0}};
  EXPECT_DOUBLE_EQ(fisher_ideal(e, 0.5), 0.25 * 25.0);
  EXPECT_DOUBLE_EQ(fisher_onebit(e, 0.0), 0.0);
}

TEST(Fisher, FiniteDeepInTheTail) {
  const WaveformEval e{{40.0, -40.0, 1e3}, {1.0, 1.0, 1.0}};
  const double f = fisher_onebit(e, 1.0);
  EXPECT_TRUE(std::isfinite(f));
  EXPECT_GE(f, 0.0);
  EXPECT_LT(f, 1e-100);
}

TEST(Fisher, DataProcessingInequalityOnScenarioWaveforms) {
  for (const char* name : {"ranging", "uwb", "mobile"}) {
    const Scenario sc = builtin_scenario(name);
    for (double gamma : {1e-3, 0.1, 1.0, 5.0}) {
      for (double scale : {0.0, 0.5, 1.0, 3.0}) {
        const double theta = sc.state.mu0 + scale * sc.state.sigma0;
        const InfoReport r = info_report(evaluate(sc.waveform, theta), gamma);
        EXPECT_LE(r.fisher_onebit, r.fisher_ideal * (1.0 + 1e-12)) << name;
        EXPECT_LE(r.chi, kTwoOverPi + 1e-12);
      }
    }
  }
}

TEST(ExpectedFisher, AgreesWithMonteCarloAverage) {
  const Scenario sc = builtin_scenario("mobile");
  const Gaussian g{0.8, 0.3};
  const double quad = expected_fisher(sc.waveform, sc.gamma, g, Receiver::OneBit);
  std::mt19937_64 gen(5);
  std::normal_distribution<double> normal(g.mean, std::sqrt(g.variance));
  const int draws = 40000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double f = fisher_onebit(evaluate(sc.waveform, normal(gen)), sc.gamma);
    sum += f;
    sq += f * f;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sq / draws - mean * mean) / draws);
  EXPECT_LT(std::abs(quad - mean), 4.0 * se);
  EXPECT_DOUBLE_EQ(expected_fisher(sc.waveform, sc.gamma, {0.8, 0.0}, Receiver::Ideal), 10.0);
}

TEST(BayesReport, AddsPriorInformation) {
  const BayesReport b = bayes_report(2.0, 4.0, 1.0);
  EXPECT_DOUBLE_EQ(b.j_onebit, 3.0);
  EXPECT_DOUBLE_EQ(b.j_ideal, 5.0);
  EXPECT_DOUBLE_EQ(b.psi, 0.6);
  EXPECT_THROW(bayes_report(0.0, 0.0, 0.0), std::domain_error);
  EXPECT_THROW(bayes_report(-1.0, 1.0, 0.0), std::invalid_argument);
}

TEST(DelayInvariance, RangingOnebitInformationBarelyMovesWithDelay) {
  const Scenario sc = builtin_scenario("ranging");
  EXPECT_LT(delay_invariance_deviation(std::get<DelayWaveform>(sc.waveform), sc.gamma, 16), 0.01);
}
