#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "onebit/state_space.hpp"

using namespace onebit;

TEST(StateSpace, MarginalMomentsFollowTheRecursion) {
  const StateSpaceModel m{0.97, 0.2, 1.5, 0.3};
  double mean = m.mu0;
  double var = m.sigma0 * m.sigma0;
  for (std::size_t k = 1; k <= 300; ++k) {
    mean *= m.alpha;
    var = m.alpha * m.alpha * var + m.sigma * m.sigma;
    const Gaussian g = marginal_moments(m, k);
    EXPECT_NEAR(g.mean, mean, 1e-13 * (1.0 + std::abs(mean)));
    EXPECT_NEAR(g.variance, var, 1e-12 * var);
  }
  const Gaussian g0 = marginal_moments(m, 0);
  EXPECT_EQ(g0.mean, m.mu0);
  EXPECT_EQ(g0.variance, m.sigma0 * m.sigma0);
}

TEST(StateSpace, AlphaCloseToOneKeepsPrecision) {
  // alpha = 1 - 1e-9: 1 - alpha^2 would lose half its digits if formed directly
  const StateSpaceModel m{1.0 - 1e-9, 1e-3, 0.0, 1.0};
  const Gaussian g = marginal_moments(m, 1000);
  // sum_{j<k} alpha^{2j} ~ k (1 - (k-1)(1-alpha)) for small k(1-alpha)
  const double geometric = 1000.0 * (1.0 - 999.0 * 1e-9);
  const double expected = std::pow(m.alpha, 2000) + geometric * 1e-6;
  EXPECT_NEAR(g.variance, expected, 1e-12);
}

TEST(StateSpace, MemorylessAndStationaryLimits) {
  const StateSpaceModel memoryless{0.0, 0.7, 3.0, 2.0};
  EXPECT_EQ(marginal_moments(memoryless, 5).mean, 0.0);
  EXPECT_DOUBLE_EQ(marginal_moments(memoryless, 5).variance, 0.49);

  const StateSpaceModel m{0.9, 0.5, 4.0, 1.0};
  const Gaussian far = marginal_moments(m, 2000);
  const Gaussian st = stationary_moments(m);
  EXPECT_NEAR(far.mean, st.mean, 1e-12);
  EXPECT_NEAR(far.variance, st.variance, 1e-12);
  EXPECT_DOUBLE_EQ(st.variance, 0.25 / 0.19);
}

TEST(StateSpace, TrajectoryIsDeterministicAndHasTheRightSpread) {
  const StateSpaceModel m{0.8, 1.0, 0.0, 1.0 / 0.6};  // starts stationary
  const auto a = sample_trajectory(m, 20000, 3);
  const auto b = sample_trajectory(m, 20000, 3);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, sample_trajectory(m, 20000, 4));
  double var = 0.0;
  for (double v : a) var += v * v;
  var /= static_cast<double>(a.size());
  // AR(1) samples are correlated; (1 + a^2)/(1 - a^2) inflates the estimator variance
  const double sd = stationary_moments(m).variance * std::sqrt(2.0 * (1 + 0.64) / (1 - 0.64) / a.size());
  EXPECT_NEAR(var, stationary_moments(m).variance, 4.0 * sd);
}

TEST(StateSpace, ZeroProcessNoiseGivesGeometricDecay) {
  const StateSpaceModel m{0.5, 0.0, 8.0, 1e-300};
  const auto t = sample_trajectory(m, 4, 1);
  for (std::size_t k = 1; k < t.size(); ++k) EXPECT_DOUBLE_EQ(t[k], 0.5 * t[k - 1]);
}

TEST(StateSpace, TransitionDensity) {
  const StateSpaceModel m{0.5, 2.0, 0.0, 1.0};
  const double expected = -0.5 * 1.0 - std::log(std::sqrt(2.0 * std::numbers::pi) * 2.0);
  EXPECT_NEAR(transition_logpdf(m, 3.0, 2.0), expected, 1e-15);
}

TEST(StateSpace, Validation) {
  EXPECT_THROW((StateSpaceModel{1.0, 1.0, 0.0, 1.0}.validate()), std::invalid_argument);
  EXPECT_THROW((StateSpaceModel{0.5, 0.0, 0.0, 1.0}.validate()), std::invalid_argument);
  EXPECT_THROW((StateSpaceModel{0.5, 1.0, 0.0, -1.0}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((StateSpaceModel{0.0, 1.0, 0.0, 1.0}.validate()));
}
