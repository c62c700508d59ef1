#include "onebit/signal_models.hpp"

#include <fftw3.h>

#include <array>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string_view>

namespace onebit {
namespace {

// FFTW planning is not thread-safe; execution with the new-array API is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(p);
  }
};
using UniquePlan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

std::vector<std::complex<double>> code_dft(const CodeSequence& code) {
  const auto c = static_cast<int>(code.size());
  std::vector<std::complex<double>> in(code.size()), out(code.size());
  for (std::size_t i = 0; i < code.size(); ++i) in[i] = static_cast<double>(code.symbols[i]);
  UniquePlan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan.reset(fftw_plan_dft_1d(c, as_fftw(in.data()), as_fftw(out.data()), FFTW_FORWARD,
                                FFTW_ESTIMATE));
  }
  fftw_execute(plan.get());
  return out;
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

// Raised-cosine spectrum as a function of u = f T_c.
double raised_cosine(double u, double rolloff) {
  const double a = std::abs(u);
  const double lo = 0.5 * (1.0 - rolloff);
  const double hi = 0.5 * (1.0 + rolloff);
  if (rolloff == 0.0) {
    if (a < 0.5) return 1.0;
    return a == 0.5 ? 0.5 : 0.0;
  }
  if (a <= lo) return 1.0;
  if (a > hi) return 0.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi / rolloff * (a - lo)));
}

// G2 phase-selector taps (1-based register stages), IS-GPS-200 Table 3-Ia.
constexpr std::array<std::array<int, 2>, 32> kG2Taps{{
    {2, 6},  {3, 7},  {4, 8},  {5, 9},  {1, 9},  {2, 10}, {1, 8},  {2, 9},
    {3, 10}, {2, 3},  {3, 4},  {5, 6},  {6, 7},  {7, 8},  {8, 9},  {9, 10},
    {1, 4},  {2, 5},  {3, 6},  {4, 7},  {5, 8},  {6, 9},  {1, 3},  {4, 6},
    {5, 7},  {6, 8},  {7, 9},  {8, 10}, {1, 6},  {2, 7},  {3, 8},  {4, 9},
}};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

void CodeSequence::validate() const {
  if (symbols.empty()) throw std::invalid_argument("code sequence is empty");
  if (!(chip_duration > 0.0) || !std::isfinite(chip_duration))
    throw std::invalid_argument("chip duration must be positive");
  for (auto b : symbols) {
    if (b != 1 && b != -1) throw std::invalid_argument("code symbols must be +1 or -1");
  }
}

CodeSequence generate_gps_ca_code(int prn, double chip_duration) {
  if (prn < 1 || prn > 32) {
    throw std::invalid_argument("GPS PRN must be in 1..32, got " + std::to_string(prn));
  }
  const auto [tap_a, tap_b] = kG2Taps[static_cast<std::size_t>(prn - 1)];
  std::array<int, 10> g1{};
  std::array<int, 10> g2{};
  g1.fill(1);
  g2.fill(1);

  CodeSequence code;
  code.chip_duration = chip_duration;
  code.symbols.reserve(kGpsCodeLength);
  for (std::size_t i = 0; i < kGpsCodeLength; ++i) {
    const int chip = g1[9] ^ g2[tap_a - 1] ^ g2[tap_b - 1];
    code.symbols.push_back(static_cast<std::int8_t>(chip == 0 ? 1 : -1));
    // G1 = 1 + x^3 + x^10, G2 = 1 + x^2 + x^3 + x^6 + x^8 + x^9 + x^10
    const int f1 = g1[2] ^ g1[9];
    const int f2 = g2[1] ^ g2[2] ^ g2[5] ^ g2[7] ^ g2[8] ^ g2[9];
    for (int j = 9; j > 0; --j) {
      g1[j] = g1[j - 1];
      g2[j] = g2[j - 1];
    }
    g1[0] = f1;
    g2[0] = f2;
  }
  return code;
}

CodeSequence load_code_from_file(const std::filesystem::path& path, double chip_duration) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open code file " + path.string(), 0);
  CodeSequence code;
  code.chip_duration = chip_duration;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto token = trim(line);
    if (token == "1" || token == "+1") {
      code.symbols.push_back(1);
    } else if (token == "0" || token == "-1") {
      code.symbols.push_back(-1);
    } else {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected a binary symbol, got '" +
                           std::string(token) + "'",
                       line_no);
    }
  }
  if (code.symbols.empty()) throw ParseError(path.string() + ": code file is empty", 0);
  return code;
}

// ---------------------------------------------------------------------------

struct DelayWaveform::Impl {
  CodeSequence code;
  Pulse pulse;
  double bandwidth = 0.0;
  std::size_t n = 0;
  double ts = 0.0;
  double period = 0.0;
  std::vector<std::complex<double>> coeff;  // m = 0..n/2, unit-power normalized
  std::vector<double> omega;                // 2 pi m / period
  UniquePlan c2r;
};

DelayWaveform::DelayWaveform(CodeSequence code, Pulse pulse, double bandwidth,
                             std::size_t samples_per_block) {
  code.validate();
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
    throw std::invalid_argument("bandwidth must be positive");
  if (samples_per_block < 2) throw std::invalid_argument("need at least two samples per block");
  if (pulse.shape == PulseShape::Nyquist && !(pulse.rolloff >= 0.0 && pulse.rolloff <= 1.0))
    throw std::invalid_argument("Nyquist roll-off must be in [0, 1]");

  auto impl = std::make_shared<Impl>();
  impl->n = samples_per_block;
  impl->ts = 1.0 / (2.0 * bandwidth);
  impl->bandwidth = bandwidth;
  impl->period = static_cast<double>(code.size()) * code.chip_duration;
  const double block = static_cast<double>(samples_per_block) * impl->ts;
  if (std::abs(block - impl->period) > 1e-9 * impl->period) {
    throw std::invalid_argument("block duration N*T_s must equal one code period C*T_c");
  }

  const std::size_t n = samples_per_block;
  const std::size_t half = n / 2;
  const std::size_t chips = code.size();
  impl->coeff.assign(half + 1, {0.0, 0.0});
  impl->omega.resize(half + 1);
  for (std::size_t m = 0; m <= half; ++m) impl->omega[m] = 2.0 * std::numbers::pi * m / impl->period;

  // harmonic m sits at frequency m / period; keep |f| < B
  const double band_limit = bandwidth * impl->period * (1.0 - 1e-12);

  if (pulse.shape == PulseShape::SampledRect) {
    const double per_chip = static_cast<double>(n) / static_cast<double>(chips);
    if (std::abs(per_chip - std::round(per_chip)) > 1e-9)
      throw std::invalid_argument("sampled rectangle needs an integer number of samples per chip");
    const auto spc = static_cast<std::size_t>(std::round(per_chip));
    std::vector<std::complex<double>> grid(n), spectrum(n);
    for (std::size_t i = 0; i < n; ++i) grid[i] = static_cast<double>(code.symbols[i / spc]);
    UniquePlan plan;
    {
      std::lock_guard lock(fftw_planner_mutex());
      plan.reset(fftw_plan_dft_1d(static_cast<int>(n), as_fftw(grid.data()), as_fftw(spectrum.data()),
                                  FFTW_FORWARD, FFTW_ESTIMATE));
    }
    fftw_execute(plan.get());
    for (std::size_t m = 0; m <= half; ++m) {
      if (static_cast<double>(m) < band_limit) impl->coeff[m] = spectrum[m] / static_cast<double>(n);
    }
  } else {
    const auto dft = code_dft(code);
    const double c = static_cast<double>(chips);
    for (std::size_t m = 0; m <= half; ++m) {
      if (!(static_cast<double>(m) < band_limit)) continue;
      const double u = static_cast<double>(m) / c;  // f * T_c
      std::complex<double> shape;
      if (pulse.shape == PulseShape::BandlimitedRect) {
        shape = sinc(u) * std::polar(1.0, -std::numbers::pi * u);
      } else {
        shape = raised_cosine(u, pulse.rolloff);
      }
      impl->coeff[m] = dft[m % chips] * shape / c;
    }
  }

  double power = std::norm(impl->coeff[0]);
  for (std::size_t m = 1; m <= half; ++m) power += 2.0 * std::norm(impl->coeff[m]);
  if (!(power > 0.0)) throw std::invalid_argument("waveform has zero power inside the band");
  const double scale = 1.0 / std::sqrt(power);
  for (auto& c : impl->coeff) c *= scale;

  {
    std::vector<std::complex<double>> in(half + 1);
    std::vector<double> out(n);
    std::lock_guard lock(fftw_planner_mutex());
    impl->c2r.reset(fftw_plan_dft_c2r_1d(static_cast<int>(n), as_fftw(in.data()), out.data(),
                                         FFTW_ESTIMATE | FFTW_UNALIGNED));
  }
  impl->code = std::move(code);
  impl->pulse = pulse;
  impl_ = std::move(impl);
}

namespace {

// Phase rotations e^{-j 2 pi m tau / P} for m = 0..half, tau reduced mod P.
void delay_phases(double theta, double period, std::vector<std::complex<double>>& rot) {
  double u = std::fmod(theta / period, 1.0);
  if (u < 0.0) u += 1.0;
  for (std::size_t m = 0; m < rot.size(); ++m) {
    double x = static_cast<double>(m) * u;
    x -= std::floor(x);
    rot[m] = std::polar(1.0, -2.0 * std::numbers::pi * x);
  }
}

}  // namespace

void DelayWaveform::eval_samples(double theta, std::vector<double>& out) const {
  if (!std::isfinite(theta)) throw std::invalid_argument("delay must be finite");
  const Impl& w = *impl_;
  std::vector<std::complex<double>> spec(w.coeff.size());
  delay_phases(theta, w.period, spec);
  for (std::size_t m = 0; m < spec.size(); ++m) spec[m] *= w.coeff[m];
  out.resize(w.n);
  fftw_execute_dft_c2r(w.c2r.get(), as_fftw(spec.data()), out.data());
}

WaveformEval DelayWaveform::eval(double theta, std::size_t /*block_index*/) const {
  if (!std::isfinite(theta)) throw std::invalid_argument("delay must be finite");
  const Impl& w = *impl_;
  const std::size_t half = w.coeff.size();
  std::vector<std::complex<double>> rot(half), spec(half), dspec(half);
  delay_phases(theta, w.period, rot);
  for (std::size_t m = 0; m < half; ++m) {
    spec[m] = w.coeff[m] * rot[m];
    // d/dtheta x(t - theta) multiplies harmonic m by -j omega_m
    dspec[m] = spec[m] * std::complex<double>(0.0, -w.omega[m]);
  }
  WaveformEval e;
  e.s.resize(w.n);
  e.ds_dtheta.resize(w.n);
  fftw_execute_dft_c2r(w.c2r.get(), as_fftw(spec.data()), e.s.data());
  fftw_execute_dft_c2r(w.c2r.get(), as_fftw(dspec.data()), e.ds_dtheta.data());
  return e;
}

std::size_t DelayWaveform::samples() const noexcept { return impl_->n; }
double DelayWaveform::sample_period() const noexcept { return impl_->ts; }
double DelayWaveform::bandwidth() const noexcept { return impl_->bandwidth; }
double DelayWaveform::period() const noexcept { return impl_->period; }
const CodeSequence& DelayWaveform::code() const noexcept { return impl_->code; }
const Pulse& DelayWaveform::pulse() const noexcept { return impl_->pulse; }
const std::vector<std::complex<double>>& DelayWaveform::coefficients() const noexcept {
  return impl_->coeff;
}

// ---------------------------------------------------------------------------

LinearWaveform::LinearWaveform(std::vector<double> pilot) : pilot_(std::move(pilot)) {
  if (pilot_.empty()) throw std::invalid_argument("pilot is empty");
  const double power =
      std::inner_product(pilot_.begin(), pilot_.end(), pilot_.begin(), 0.0) / static_cast<double>(pilot_.size());
  if (std::abs(power - 1.0) > 1e-9) throw std::invalid_argument("pilot must have unit average power");
}

WaveformEval LinearWaveform::eval(double theta, std::size_t /*block_index*/) const {
  if (!std::isfinite(theta)) throw std::invalid_argument("gain must be finite");
  WaveformEval e;
  e.s.resize(pilot_.size());
  for (std::size_t n = 0; n < pilot_.size(); ++n) e.s[n] = theta * pilot_[n];
  e.ds_dtheta = pilot_;
  return e;
}

WaveformEval eval_delay_waveform(const SampledWaveform& w, double theta, std::size_t block_index) {
  const auto* d = std::get_if<DelayWaveform>(&w);
  if (d == nullptr) throw std::invalid_argument("waveform is not delay-modulated");
  return d->eval(theta, block_index);
}

WaveformEval eval_linear_waveform(const SampledWaveform& w, double theta, std::size_t block_index) {
  const auto* l = std::get_if<LinearWaveform>(&w);
  if (l == nullptr) throw std::invalid_argument("waveform is not a linear-gain model");
  return l->eval(theta, block_index);
}

WaveformEval evaluate(const SampledWaveform& w, double theta, std::size_t block_index) {
  return std::visit([&](const auto& wf) { return wf.eval(theta, block_index); }, w);
}

std::size_t samples_per_block(const SampledWaveform& w) noexcept {
  return std::visit([](const auto& wf) { return wf.samples(); }, w);
}

std::vector<double> nyquist_pilot(const CodeSequence& code, std::size_t n) {
  code.validate();
  std::vector<double> pilot(n);
  for (std::size_t i = 0; i < n; ++i) pilot[i] = static_cast<double>(code.symbols[i % code.size()]);
  return pilot;
}

}  // namespace onebit
