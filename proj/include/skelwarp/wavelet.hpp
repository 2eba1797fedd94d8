#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skelwarp/core.hpp"
#include "skelwarp/error.hpp"

namespace skelwarp {

enum class WaveletFamily { Daubechies, Coiflet, Symlet };

struct WaveletSpec {
  WaveletFamily family = WaveletFamily::Daubechies;
  int order = 4;
  int levels = 3;

  friend bool operator==(const WaveletSpec&, const WaveletSpec&) = default;
};

/// Orders used when only the family is chosen (e.g. by the tuning grid).
int default_order(WaveletFamily family) noexcept;

/// "db4/3" style label: family short name, order, levels.
std::string to_string(const WaveletSpec& spec);
std::string_view short_name(WaveletFamily family) noexcept;
/// Accepts "db", "daubechies", "coif", "coiflet", "sym", "symlet".
WaveletFamily parse_family(std::string_view name);

/// Orthonormal low-pass decomposition filter. Supported orders:
/// Daubechies 1-10, Coiflet 1-5, Symlet 2-10.
std::span<const double> scaling_filter(WaveletFamily family, int order);

struct FilterBank {
  std::vector<double> low;
  std::vector<double> high;
};

FilterBank analysis_filters(WaveletFamily family, int order);

/// Length of one decomposition stage's output: floor((n + F - 1) / 2).
std::size_t stage_length(std::size_t n, std::size_t filter_length) noexcept;

/// One analysis stage with half-point symmetric extension:
/// out[o] = sum_j filter[j] * x[2o + 1 - j].
Signal analysis_stage(std::span<const double> x, std::span<const double> filter);

enum class DepthPolicy {
  /// Throw SignalTooShort when a stage would receive fewer than 2 samples.
  Strict,
  /// Stop at that stage; the deeper detail blocks are emitted empty.
  StopEarly,
};

/// Multilevel decomposition. Returns levels + 1 arrays:
/// [A_levels, D_levels, ..., D_1].
std::vector<Signal> wavedec(std::span<const double> x, const WaveletSpec& spec,
                            DepthPolicy policy = DepthPolicy::Strict);

/// Per-block coefficient counts of `wavedec` for a length-n input.
std::vector<std::size_t> wavedec_lengths(std::size_t n, const WaveletSpec& spec,
                                         DepthPolicy policy = DepthPolicy::Strict);

}  // namespace skelwarp
