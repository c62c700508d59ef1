#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "onebit/experiments.hpp"

using namespace onebit;

TEST(Scenario, RangingParameters) {
  const Scenario sc = builtin_scenario("ranging");
  const auto& w = std::get<DelayWaveform>(sc.waveform);
  EXPECT_EQ(w.samples(), 2046u);
  EXPECT_EQ(w.code().size(), 1023u);
  EXPECT_EQ(sc.blocks, 250u);
  EXPECT_DOUBLE_EQ(sc.snr_db, -15.0);
  EXPECT_NEAR(sc.gamma, std::pow(10.0, -0.75), 1e-15);
  EXPECT_NEAR(sc.state.alpha, 1.0 - 1e-3, 1e-15);
  EXPECT_NEAR(sc.state.sigma / sc.chip_duration, 1e-3, 1e-15);
  EXPECT_NEAR(sc.state.mu0 / sc.chip_duration, 398.7342, 1e-10);
  EXPECT_NEAR(sc.state.sigma0 / sc.chip_duration, 0.1, 1e-15);
  EXPECT_EQ(sc.filter.particles, 100u);
  EXPECT_DOUBLE_EQ(sc.filter.kappa, 0.66);
  EXPECT_EQ(sc.report_unit, Unit::Meters);
}

TEST(Scenario, GainScenarios) {
  const Scenario uwb = builtin_scenario("uwb");
  const double snr = std::pow(10.0, -1.5);
  EXPECT_DOUBLE_EQ(uwb.state.sigma0, 0.05);
  EXPECT_NEAR(uwb.state.alpha, 1.0 - 1e-4, 1e-15);
  EXPECT_NEAR(uwb.state.sigma, std::sqrt((1.0 - uwb.state.alpha * uwb.state.alpha) * snr), 1e-15);
  EXPECT_NEAR(uwb.state.mu0, std::sqrt(snr), 1e-15);
  EXPECT_EQ(samples_per_block(uwb.waveform), 10u);

  const Scenario mobile = builtin_scenario("mobile");
  EXPECT_DOUBLE_EQ(mobile.snr_db, 6.0);
  // sigma0 = 1 / sqrt(E[F_inf]) with F_inf = |x|^2 = N
  EXPECT_NEAR(mobile.state.sigma0, 1.0 / std::sqrt(10.0), 1e-15);
  EXPECT_EQ(mobile.blocks, 1000u);
  EXPECT_THROW(builtin_scenario("radar"), std::invalid_argument);
}

TEST(Scenario, OverridesRederiveDependentParameters) {
  ScenarioParams p;
  p.alpha = 0.99;
  p.snr_db = 0.0;
  const Scenario uwb = build_scenario("uwb", p);
  EXPECT_NEAR(uwb.state.sigma, std::sqrt(1.0 - 0.99 * 0.99), 1e-15);
  EXPECT_DOUBLE_EQ(uwb.state.mu0, 1.0);
  ScenarioParams q;
  q.sigma = 2e-3;
  const Scenario r = build_scenario("ranging", q);
  EXPECT_NEAR(r.state.sigma, 2e-3 * r.chip_duration, 1e-20);
}

TEST(Units, RoundTripIsIdentity) {
  const double tc = kGpsChipDuration;
  for (double v : {1e-3, 0.5, 398.7342, 1e4}) {
    const double s = convert_length(v, Unit::Chips, Unit::Seconds, tc);
    const double m = convert_length(s, Unit::Seconds, Unit::Meters, tc);
    EXPECT_NEAR(convert_length(m, Unit::Meters, Unit::Chips, tc), v, 1e-12 * v);
  }
  EXPECT_NEAR(convert_length(1.0, Unit::Chips, Unit::Meters, tc), kSpeedOfLight / 1.023e6, 1e-9);
  EXPECT_THROW(to_report_unit(1.0, builtin_scenario("uwb"), Unit::Meters), std::invalid_argument);
  EXPECT_EQ(parse_unit("chips"), Unit::Chips);
  EXPECT_THROW(parse_unit("furlongs"), std::invalid_argument);
}

TEST(Bounds, RangingLossCurve) {
  const Scenario sc = builtin_scenario("ranging");
  const BoundTrajectory t = run_bounds(sc);
  ASSERT_EQ(t.rho.size(), 251u);
  EXPECT_DOUBLE_EQ(1.0 / std::sqrt(t.u_onebit[0]), sc.state.sigma0);
  EXPECT_NEAR(to_db(t.rho[1]), -1.38, 0.05);
  EXPECT_NEAR(to_db(t.rho[15]), -1.90, 0.05);
  EXPECT_NEAR(to_db(t.rho_steady), -0.93, 0.05);
}

TEST(Bounds, UwbSteadyLoss) {
  const BoundTrajectory t = run_bounds(builtin_scenario("uwb"));
  EXPECT_NEAR(to_db(t.rho_steady), -1.02, 0.05);
}

TEST(Bounds, ZeroBlocksGivesTheInitialRowOnly) {
  ScenarioParams p;
  p.blocks = 0;
  const Scenario sc = build_scenario("uwb", p);
  const BoundTrajectory t = run_bounds(sc);
  ASSERT_EQ(t.u_onebit.size(), 1u);
  EXPECT_DOUBLE_EQ(1.0 / std::sqrt(t.u_ideal[0]), 0.05);
}

TEST(Sweep, MemorylessEndMeetsTheBlockBayesianLoss) {
  const Scenario sc = builtin_scenario("mobile");
  const std::vector<double> betas{1.0};
  const auto rows = sweep_beta(sc, betas);
  EXPECT_NEAR(rows[0].rho_db, rows[0].psi_db, 0.1);
}

TEST(Sweep, LossShrinksAsTheChannelSlowsDown) {
  const Scenario sc = builtin_scenario("mobile");
  const auto grid = log_grid(1e-7, 1.0, 29);
  EXPECT_DOUBLE_EQ(grid.front(), 1e-7);
  EXPECT_DOUBLE_EQ(grid.back(), 1.0);
  const auto rows = sweep_beta(sc, grid);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    // grid ascends in beta, so the loss in dB must not rise as beta falls
    EXPECT_LE(rows[i].rho_db, rows[i - 1].rho_db + 1e-12);
    EXPECT_NEAR(rows[i].psi_db, rows[0].psi_db, 1e-9);
  }
  // slow evolution: half the Fisher loss in dB
  const double chi_bar = scenario_bayes(sc).fbar_onebit / scenario_bayes(sc).fbar_ideal;
  EXPECT_NEAR(rows.front().rho_db, 0.5 * to_db(chi_bar), 0.05);
  EXPECT_THROW(sweep_beta(builtin_scenario("ranging"), grid), std::invalid_argument);
}

TEST(FiniteLoss, StartsAtZeroAndSettles) {
  const Scenario sc = builtin_scenario("mobile");
  const std::vector<double> betas{1e-1, 1e-3};
  const auto rows = finite_k_loss(sc, betas, 1000);
  ASSERT_EQ(rows.size(), 2u * 1001u);
  EXPECT_DOUBLE_EQ(rows[0].rho_k_db, 0.0);
  EXPECT_DOUBLE_EQ(rows[1001].rho_k_db, 0.0);
  const auto steady = sweep_beta(sc, std::vector<double>{1e-1});
  EXPECT_NEAR(rows[1000].rho_k_db, steady[0].rho_db, 1e-6);
}

TEST(FiniteLoss, SlowerChannelsTakeLongerToSettle) {
  std::size_t previous = 0;
  for (double beta : {1e-1, 1e-2, 1e-3, 1e-4}) {
    ScenarioParams p;
    p.alpha = 1.0 - beta;
    const TransientReport t = scenario_transient(build_scenario("mobile", p), 3.0);
    EXPECT_GT(t.k_lambda, previous) << beta;
    previous = t.k_lambda;
  }
}

TEST(MonteCarlo, IndependentOfWorkerCount) {
  ScenarioParams p;
  p.blocks = 30;
  const Scenario sc = build_scenario("uwb", p);
  MonteCarloOptions opt;
  opt.processes = 3;
  opt.realizations = 4;
  opt.seed = 77;
  opt.workers = 1;
  const MonteCarloResult a = run_montecarlo(sc, opt);
  opt.workers = 4;
  const MonteCarloResult b = run_montecarlo(sc, opt);
  ASSERT_EQ(a.per_block.size(), 31u);
  for (std::size_t k = 0; k < a.per_block.size(); ++k) {
    EXPECT_EQ(a.per_block[k].rmse_onebit, b.per_block[k].rmse_onebit);
    EXPECT_EQ(a.per_block[k].rmse_ideal, b.per_block[k].rmse_ideal);
  }
  opt.seed = 78;
  EXPECT_NE(run_montecarlo(sc, opt).per_block[30].rmse_onebit, a.per_block[30].rmse_onebit);
}

TEST(MonteCarlo, IdealReceiverReachesTheKalmanError) {
  ScenarioParams p;
  p.snr_db = 10.0;
  p.blocks = 150;
  const Scenario sc = build_scenario("uwb", p);
  MonteCarloOptions opt;
  opt.processes = 10;
  opt.realizations = 20;
  const MonteCarloResult r = run_montecarlo(sc, opt);
  EXPECT_EQ(r.discarded, 0u);
  const EfficiencyRatio e = steady_efficiency(r, 100);
  EXPECT_NEAR(e.ideal, 1.0, 0.1);
  EXPECT_GT(e.onebit, 0.9);
}

TEST(MonteCarlo, RejectsEmptyRuns) {
  MonteCarloOptions opt;
  opt.realizations = 0;
  EXPECT_THROW(run_montecarlo(builtin_scenario("uwb"), opt), std::invalid_argument);
  opt.realizations = 1;
  opt.unit = Unit::Meters;
  EXPECT_THROW(run_montecarlo(builtin_scenario("uwb"), opt), std::invalid_argument);
}

TEST(MonteCarlo, RangingReportsMeters) {
  ScenarioParams p;
  p.blocks = 3;
  const Scenario sc = build_scenario("ranging", p);
  MonteCarloOptions opt;
  opt.processes = 1;
  opt.realizations = 2;
  const MonteCarloResult r = run_montecarlo(sc, opt);
  EXPECT_NEAR(r.per_block[0].bound_onebit, 0.1 * kSpeedOfLight / 1.023e6, 1e-9);
  EXPECT_EQ(r.unit, Unit::Meters);
}
