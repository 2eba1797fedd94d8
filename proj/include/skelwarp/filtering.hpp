#pragma once

#include <span>

#include "skelwarp/core.hpp"

namespace skelwarp {

struct FilterParams {
  int median_window = 5;
  int savgol_window = 11;
  int savgol_order = 3;
};

void validate(const FilterParams& p);

/// Running median with windows truncated at the boundaries.
Signal median_filter(std::span<const double> x, int window);

/// Savitzky-Golay smoothing. Every output point is the value of the
/// least-squares polynomial fitted over a full window; near the ends the
/// window is shifted inward and the fit evaluated off-center, so no padding
/// is invented. Throws SignalTooShort when |x| < window.
Signal savgol_filter(std::span<const double> x, int window, int order);

/// Median then Savitzky-Golay on every sub-signal. Sub-signals shorter than
/// the Savitzky-Golay window are only median filtered.
TrajectorySample smooth_sample(const TrajectorySample& s, const FilterParams& p);

}  // namespace skelwarp
