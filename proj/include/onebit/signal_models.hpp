#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace onebit {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s
inline constexpr double kGpsChipRate = 1.023e6;         // chips/s
inline constexpr double kGpsChipDuration = 1.0 / kGpsChipRate;
inline constexpr std::size_t kGpsCodeLength = 1023;

/// Binary spreading / pilot sequence with symbols in {+1, -1}.
struct CodeSequence {
  std::vector<std::int8_t> symbols;
  double chip_duration = kGpsChipDuration;  // seconds

  std::size_t size() const noexcept { return symbols.size(); }
  void validate() const;
};

/// Thrown by load_code_from_file; line() is 1-based, 0 for whole-file errors.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// 1023-chip GPS C/A Gold code of satellite `prn` (1..32), chip value
/// 0 -> +1 and 1 -> -1.
CodeSequence generate_gps_ca_code(int prn, double chip_duration = kGpsChipDuration);

/// Reads one symbol per line; accepted tokens are 1, +1, -1 and 0 (0 -> -1).
CodeSequence load_code_from_file(const std::filesystem::path& path,
                                 double chip_duration = kGpsChipDuration);

/// Block-level waveform samples s(theta) and their derivative w.r.t. theta.
struct WaveformEval {
  std::vector<double> s;
  std::vector<double> ds_dtheta;

  std::size_t size() const noexcept { return s.size(); }
};

enum class PulseShape {
  BandlimitedRect,  // rectangular chip pulse, spectrum truncated to |f| < B
  SampledRect,      // rectangle drawn on the f_s grid, then interpolated
  Nyquist,          // raised-cosine spectrum with the given roll-off
};

struct Pulse {
  PulseShape shape = PulseShape::BandlimitedRect;
  double rolloff = 0.0;  // Nyquist only
};

/// Periodic code-modulated signal x(t) = sum_c b[c mod C] g(t - c T_c),
/// band-limited to B and sampled at f_s = 2B. Evaluation at a delay theta
/// (seconds) is exact: the period is held as a truncated Fourier series and
/// delays / derivatives are applied as phase rotations.
///
/// One block must span exactly one code period (N T_s = C T_c), so every
/// block is phase-aligned and the block index does not change the samples.
/// Instances are immutable and safe to share across threads.
class DelayWaveform {
 public:
  DelayWaveform(CodeSequence code, Pulse pulse, double bandwidth, std::size_t samples_per_block);

  WaveformEval eval(double theta, std::size_t block_index = 1) const;
  /// Samples only, written to `out` (size N).
  void eval_samples(double theta, std::vector<double>& out) const;

  std::size_t samples() const noexcept;
  double sample_period() const noexcept;
  double bandwidth() const noexcept;
  double period() const noexcept;
  const CodeSequence& code() const noexcept;
  const Pulse& pulse() const noexcept;
  /// Normalized Fourier coefficients c_m, m = 0..N/2 (c_{-m} = conj(c_m)).
  const std::vector<std::complex<double>>& coefficients() const noexcept;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// Linear-gain model s(theta) = theta * x with a fixed unit-power pilot x.
class LinearWaveform {
 public:
  explicit LinearWaveform(std::vector<double> pilot);

  WaveformEval eval(double theta, std::size_t block_index = 1) const;
  std::size_t samples() const noexcept { return pilot_.size(); }
  const std::vector<double>& pilot() const noexcept { return pilot_; }

 private:
  std::vector<double> pilot_;
};

using SampledWaveform = std::variant<DelayWaveform, LinearWaveform>;

WaveformEval eval_delay_waveform(const SampledWaveform& w, double theta, std::size_t block_index);
WaveformEval eval_linear_waveform(const SampledWaveform& w, double theta, std::size_t block_index);
/// Dispatches on the waveform kind.
WaveformEval evaluate(const SampledWaveform& w, double theta, std::size_t block_index = 1);
std::size_t samples_per_block(const SampledWaveform& w) noexcept;

/// Pilot for an ideal-sinc Nyquist pulse sampled at the symbol rate: the
/// symbol stream repeated to fill n samples.
std::vector<double> nyquist_pilot(const CodeSequence& code, std::size_t n);

}  // namespace onebit
