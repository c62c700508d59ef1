#include "onebit/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>

#include <omp.h>

#include "onebit/likelihood.hpp"
#include "onebit/quantized_channel.hpp"
#include "onebit/rng.hpp"

namespace onebit {

namespace {

constexpr std::uint64_t kTrajectoryTag = 0x74726a;
constexpr std::uint64_t kNoiseTag = 0x6e6f6973;
constexpr std::uint64_t kFilterTag = 0x66696c74;

double snr_linear(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

// First C chips of PRN 1 as the +-1 pilot of the gain scenarios.
std::vector<double> default_pilot(std::size_t c) {
  CodeSequence code = generate_gps_ca_code(1);
  code.symbols.resize(c);
  return nyquist_pilot(code, c);
}

void require_gain(const Scenario& sc, const char* what) {
  if (sc.is_delay()) throw std::invalid_argument(std::string(what) + " is defined for gain scenarios only");
}

double info_at(const Scenario& sc, const Gaussian& dist, Receiver receiver) {
  if (sc.is_delay()) return fisher(evaluate(sc.waveform, dist.mean), sc.gamma, receiver);
  return expected_fisher(sc.waveform, sc.gamma, dist, receiver);
}

StateSpaceModel gain_model(double beta, double snr, const StateSpaceModel& base) {
  StateSpaceModel m = base;
  m.alpha = 1.0 - beta;
  // from the stored alpha, so the stationary variance is SNR to rounding
  m.sigma = std::sqrt(m.one_minus_alpha_sq() * snr);
  return m;
}

}  // namespace

Unit parse_unit(const std::string& text) {
  if (text == "chips") return Unit::Chips;
  if (text == "seconds") return Unit::Seconds;
  if (text == "meters") return Unit::Meters;
  if (text == "native") return Unit::Native;
  throw std::invalid_argument("unknown unit '" + text + "'");
}

std::string unit_name(Unit unit) {
  switch (unit) {
    case Unit::Chips: return "chips";
    case Unit::Seconds: return "seconds";
    case Unit::Meters: return "meters";
    case Unit::Native: return "native";
  }
  return "native";
}

void Scenario::validate() const {
  state.validate();
  filter.validate();
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be finite and non-negative");
  if (is_delay() && !(chip_duration > 0.0)) throw std::invalid_argument("delay scenario needs a chip duration");
}

Scenario build_scenario(const std::string& name, const ScenarioParams& params) {
  Scenario sc;
  sc.name = name;
  if (name == "ranging") {
    const CodeSequence code = generate_gps_ca_code(5);
    const double tc = code.chip_duration;
    sc.waveform = DelayWaveform(code, Pulse{PulseShape::BandlimitedRect, 0.0}, kGpsChipRate, 2046);
    sc.snr_db = params.snr_db.value_or(-15.0);
    sc.gamma = std::pow(10.0, sc.snr_db / 20.0);
    sc.state.alpha = params.alpha.value_or(1.0 - 1e-3);
    sc.state.sigma = params.sigma.value_or(1e-3) * tc;
    sc.state.mu0 = 398.7342 * tc;
    sc.state.sigma0 = 0.1 * tc;
    sc.blocks = params.blocks.value_or(250);
    sc.chip_duration = tc;
    sc.report_unit = Unit::Meters;
  } else if (name == "uwb" || name == "mobile") {
    const bool uwb = name == "uwb";
    const std::vector<double> pilot = default_pilot(10);
    sc.snr_db = params.snr_db.value_or(uwb ? -15.0 : 6.0);
    // the SNR lives in the scale of theta: stationary theta ~ N(0, SNR)
    sc.gamma = 1.0;
    const double snr = snr_linear(sc.snr_db);
    sc.state.alpha = params.alpha.value_or(uwb ? 1.0 - 1e-4 : 1.0 - 1e-3);
    sc.state.sigma = params.sigma.value_or(std::sqrt(sc.state.one_minus_alpha_sq() * snr));
    sc.state.mu0 = std::sqrt(snr);
    double pilot_sq = 0.0;
    for (double x : pilot) pilot_sq += x * x;
    sc.state.sigma0 = uwb ? 0.05 : 1.0 / std::sqrt(sc.gamma * sc.gamma * pilot_sq);
    sc.waveform = LinearWaveform(pilot);
    sc.blocks = params.blocks.value_or(uwb ? 250 : 1000);
    sc.report_unit = Unit::Native;
  } else {
    throw std::invalid_argument("unknown scenario '" + name + "' (expected ranging, uwb or mobile)");
  }
  sc.filter.particles = params.particles.value_or(100);
  sc.filter.kappa = params.kappa.value_or(0.66);
  sc.validate();
  return sc;
}

Scenario builtin_scenario(const std::string& name) { return build_scenario(name, {}); }

double convert_length(double value, Unit from, Unit to, double chip_duration) {
  if (from == to) return value;
  auto seconds_per = [&](Unit u) {
    switch (u) {
      case Unit::Seconds: return 1.0;
      case Unit::Meters: return 1.0 / kSpeedOfLight;
      case Unit::Chips:
        if (!(chip_duration > 0.0)) throw std::invalid_argument("chip conversion needs a chip duration");
        return chip_duration;
      case Unit::Native: break;
    }
    throw std::invalid_argument("native units do not convert to physical lengths");
  };
  return value * seconds_per(from) / seconds_per(to);
}

double to_report_unit(double value, const Scenario& sc, Unit unit) {
  if (!sc.is_delay()) {
    if (unit != Unit::Native) throw std::invalid_argument("gain scenarios report in native units only");
    return value;
  }
  if (unit == Unit::Native) return value;
  return convert_length(value, Unit::Seconds, unit, sc.chip_duration);
}

FisherSchedule fisher_schedule(const Scenario& sc, std::size_t blocks) {
  FisherSchedule f;
  f.onebit.resize(blocks);
  f.ideal.resize(blocks);
  for (std::size_t k = 1; k <= blocks; ++k) {
    const Gaussian g = marginal_moments(sc.state, k);
    f.onebit[k - 1] = info_at(sc, g, Receiver::OneBit);
    f.ideal[k - 1] = info_at(sc, g, Receiver::Ideal);
  }
  const Gaussian g = stationary_moments(sc.state);
  f.steady_onebit = info_at(sc, g, Receiver::OneBit);
  f.steady_ideal = info_at(sc, g, Receiver::Ideal);
  return f;
}

BoundTrajectory run_bounds(const Scenario& sc) {
  sc.validate();
  const FisherSchedule f = fisher_schedule(sc, sc.blocks);
  return bound_trajectory(sc.state, f.onebit, f.ideal, f.steady_onebit, f.steady_ideal);
}

InfoReport scenario_fisher(const Scenario& sc) {
  sc.validate();
  return info_report(evaluate(sc.waveform, sc.state.mu0), sc.gamma);
}

BayesReport scenario_bayes(const Scenario& sc) {
  sc.validate();
  const Gaussian g = stationary_moments(sc.state);
  const double j_prior = 1.0 / g.variance;
  return bayes_report(info_at(sc, g, Receiver::OneBit), info_at(sc, g, Receiver::Ideal), j_prior);
}

TransientReport scenario_transient(const Scenario& sc, double lambda) {
  sc.validate();
  const Gaussian g = stationary_moments(sc.state);
  return transient_report(sc.state, info_at(sc, g, Receiver::OneBit), info_at(sc, g, Receiver::Ideal), lambda);
}

MonteCarloResult run_montecarlo(const Scenario& sc, const MonteCarloOptions& opt) {
  sc.validate();
  if (opt.processes < 1 || opt.realizations < 1)
    throw std::invalid_argument("Monte-Carlo run needs at least one process and one realization");
  if (sc.blocks < 1) throw std::invalid_argument("Monte-Carlo run needs at least one block");
  const Unit unit = opt.unit.value_or(sc.report_unit);
  to_report_unit(0.0, sc, unit);  // rejects impossible units before the run

  const std::size_t K = sc.blocks;
  const std::size_t N = samples_per_block(sc.waveform);
  const std::size_t trials = opt.processes * opt.realizations;
  const NoiseModel noise{derive_stream(opt.seed, {kNoiseTag})};
  const Gaussian prior{sc.state.mu0, sc.state.sigma0 * sc.state.sigma0};

  std::optional<DelayLikelihoodTable> table;
  std::optional<GainLikelihood> gain;
  if (const auto* d = std::get_if<DelayWaveform>(&sc.waveform)) {
    if (!opt.exact_likelihood) table.emplace(*d, sc.gamma);
  } else {
    gain.emplace(std::get<LinearWaveform>(sc.waveform).pilot(), sc.gamma);
  }

  std::vector<double> se_onebit(trials * (K + 1));
  std::vector<double> se_ideal(trials * (K + 1));
  std::vector<unsigned char> discarded(trials, 0);
  std::exception_ptr failure;

  const int workers = opt.workers > 0 ? opt.workers : omp_get_max_threads();
  const auto count = static_cast<std::ptrdiff_t>(trials);
#pragma omp parallel for schedule(dynamic) num_threads(workers)
  for (std::ptrdiff_t t = 0; t < count; ++t) {
    const auto trial = static_cast<std::size_t>(t);
    const std::uint64_t p = trial / opt.realizations;
    const std::uint64_t r = trial % opt.realizations;
    try {
      const std::vector<double> theta =
          sample_trajectory(sc.state, K, derive_stream(opt.seed, {kTrajectoryTag, p}));
      CounterRng rng_onebit(derive_stream(opt.seed, {kFilterTag, p, r, 0}));
      CounterRng rng_ideal(derive_stream(opt.seed, {kFilterTag, p, r, 1}));
      ParticleCloud onebit = pf_init(sc.filter, prior, rng_onebit);
      ParticleCloud ideal = pf_init(sc.filter, prior, rng_ideal);
      double* e1 = se_onebit.data() + trial * (K + 1);
      double* e2 = se_ideal.data() + trial * (K + 1);
      e1[0] = std::pow(onebit.mean() - theta[0], 2);
      e2[0] = std::pow(ideal.mean() - theta[0], 2);

      std::vector<double> s(N);
      std::vector<double> y(N);
      std::vector<std::int8_t> bits(N);
      for (std::size_t k = 1; k <= K; ++k) {
        if (const auto* d = std::get_if<DelayWaveform>(&sc.waveform)) {
          d->eval_samples(theta[k], s);
        } else {
          const auto& x = std::get<LinearWaveform>(sc.waveform).pilot();
          for (std::size_t n = 0; n < N; ++n) s[n] = theta[k] * x[n];
        }
        sample_block_into(s, sc.gamma, noise, {p, r, k}, y, bits);

        auto ll_onebit = [&](std::span<const double> th, std::span<double> out) {
          if (table) {
            table->batch_onebit(bits, th, out);
          } else if (gain) {
            gain->batch_onebit(bits, th, out);
          } else {
            exact_loglik_onebit(sc.waveform, sc.gamma, bits, th, out);
          }
        };
        auto ll_ideal = [&](std::span<const double> th, std::span<double> out) {
          if (table) {
            table->batch_ideal(y, th, out);
          } else if (gain) {
            gain->batch_ideal(y, th, out);
          } else {
            exact_loglik_ideal(sc.waveform, sc.gamma, y, th, out);
          }
        };
        const StepResult a = pf_step(onebit, sc.state, ll_onebit, sc.filter, rng_onebit);
        const StepResult b = pf_step(ideal, sc.state, ll_ideal, sc.filter, rng_ideal);
        e1[k] = std::pow(a.estimate - theta[k], 2);
        e2[k] = std::pow(b.estimate - theta[k], 2);
      }
    } catch (const DegenerateCloudError&) {
      discarded[trial] = 1;
    } catch (...) {
#pragma omp critical(onebit_mc_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  const BoundTrajectory bounds = run_bounds(sc);
  MonteCarloResult res;
  res.processes = opt.processes;
  res.realizations = opt.realizations;
  res.unit = unit;
  res.discarded = static_cast<std::size_t>(std::count(discarded.begin(), discarded.end(), 1));
  const std::size_t kept = trials - res.discarded;
  res.per_block.resize(K + 1);
  for (std::size_t k = 0; k <= K; ++k) {
    double m1 = 0.0;
    double m2 = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      if (discarded[t]) continue;
      m1 += se_onebit[t * (K + 1) + k];
      m2 += se_ideal[t * (K + 1) + k];
    }
    BlockStats& b = res.per_block[k];
    b.k = k;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    b.rmse_onebit = kept ? to_report_unit(std::sqrt(m1 / static_cast<double>(kept)), sc, unit) : nan;
    b.rmse_ideal = kept ? to_report_unit(std::sqrt(m2 / static_cast<double>(kept)), sc, unit) : nan;
    b.bound_onebit = to_report_unit(1.0 / std::sqrt(bounds.u_onebit[k]), sc, unit);
    b.bound_ideal = to_report_unit(1.0 / std::sqrt(bounds.u_ideal[k]), sc, unit);
    b.rho_db = to_db(bounds.rho[k]);
  }
  return res;
}

EfficiencyRatio steady_efficiency(const MonteCarloResult& result, std::size_t window) {
  const std::size_t n = result.per_block.size();
  if (window < 1 || window >= n) throw std::invalid_argument("efficiency window must lie inside blocks 1..K");
  double mse1 = 0.0, mse2 = 0.0, b1 = 0.0, b2 = 0.0;
  for (std::size_t k = n - window; k < n; ++k) {
    const BlockStats& s = result.per_block[k];
    mse1 += s.rmse_onebit * s.rmse_onebit;
    mse2 += s.rmse_ideal * s.rmse_ideal;
    b1 += s.bound_onebit * s.bound_onebit;
    b2 += s.bound_ideal * s.bound_ideal;
  }
  return {std::sqrt(mse1 / b1), std::sqrt(mse2 / b2)};
}

std::vector<double> log_grid(double beta_min, double beta_max, std::size_t points) {
  if (!(beta_min > 0.0) || !(beta_max >= beta_min) || !(beta_max <= 1.0))
    throw std::invalid_argument("beta range must satisfy 0 < min <= max <= 1");
  if (points < 1) throw std::invalid_argument("grid needs at least one point");
  if (points == 1) return {beta_min};
  std::vector<double> grid(points);
  const double lo = std::log10(beta_min);
  const double step = (std::log10(beta_max) - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = std::pow(10.0, lo + step * static_cast<double>(i));
  grid.front() = beta_min;
  grid.back() = beta_max;
  return grid;
}

std::vector<SweepRow> sweep_beta(const Scenario& base, std::span<const double> betas) {
  require_gain(base, "beta sweep");
  const double snr = snr_linear(base.snr_db);
  std::vector<SweepRow> rows;
  rows.reserve(betas.size());
  for (double beta : betas) {
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in (0, 1]");
    Scenario sc = base;
    sc.state = gain_model(beta, snr, base.state);
    const Gaussian g = stationary_moments(sc.state);
    const double f1 = info_at(sc, g, Receiver::OneBit);
    const double f2 = info_at(sc, g, Receiver::Ideal);
    const SlowEvolutionLoss loss = slow_evolution_loss(f1, f2, sc.state);
    const BayesReport bayes = bayes_report(f1, f2, 1.0 / g.variance);
    rows.push_back({beta, to_db(loss.rho), to_db(bayes.psi)});
  }
  return rows;
}

std::vector<FiniteLossRow> finite_k_loss(const Scenario& base, std::span<const double> betas, std::size_t blocks) {
  require_gain(base, "finite-horizon loss");
  const double snr = snr_linear(base.snr_db);
  std::vector<FiniteLossRow> rows;
  rows.reserve(betas.size() * (blocks + 1));
  for (double beta : betas) {
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in (0, 1]");
    Scenario sc = base;
    sc.state = gain_model(beta, snr, base.state);
    sc.blocks = blocks;
    const BoundTrajectory t = run_bounds(sc);
    for (std::size_t k = 0; k <= blocks; ++k) rows.push_back({beta, k, to_db(t.rho[k])});
  }
  return rows;
}

}  // namespace onebit
