#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "onebit/signal_models.hpp"

namespace onebit {

/// Observations of one block: the high-resolution samples y_k (when
/// retained) and the hard-limited samples r_k = sign(y_k) in {+1, -1}.
struct BlockObservation {
  std::optional<std::vector<double>> ideal;
  std::vector<std::int8_t> onebit;
};

/// Unit-variance white Gaussian noise addressed by a 64-bit seed.
struct NoiseModel {
  std::uint64_t seed = 0;
};

/// Addresses an independent noise substream; the Monte-Carlo harness hands
/// out disjoint positions.
struct StreamPosition {
  std::uint64_t trial = 0;
  std::uint64_t realization = 0;
  std::uint64_t block = 0;
};

/// sign(x) with sign(0) = +1.
constexpr std::int8_t hard_limit(double x) noexcept { return x >= 0.0 ? 1 : -1; }

/// y = gamma * s + eta, r = sign(y). Bit-identical for identical
/// (seed, position).
BlockObservation sample_block(const WaveformEval& eval, double gamma, const NoiseModel& noise,
                              const StreamPosition& position, bool keep_ideal = true);

/// Same draw as sample_block, written into caller-owned buffers.
void sample_block_into(std::span<const double> s, double gamma, const NoiseModel& noise,
                       const StreamPosition& position, std::span<double> y, std::span<std::int8_t> r);

/// log p(r | theta) = sum_n log Q(-gamma r_n s_n).
double loglik_onebit(std::span<const std::int8_t> r, const WaveformEval& eval, double gamma);

/// log p(y | theta) = -(N/2) log(2 pi) - |y - gamma s|^2 / 2.
double loglik_ideal(std::span<const double> y, const WaveformEval& eval, double gamma);

}  // namespace onebit
