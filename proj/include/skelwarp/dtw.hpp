#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "skelwarp/core.hpp"

namespace skelwarp {

/// Index correspondence between a source sequence A and a base sequence B,
/// stored as two parallel 0-based index lists. The path starts at (0, 0),
/// ends at (|A|-1, |B|-1) and every step advances one or both indices by one.
struct WarpingPath {
  std::vector<std::size_t> source;
  std::vector<std::size_t> base;

  std::size_t size() const noexcept { return source.size(); }
};

struct DtwResult {
  double distance = 0.0;  // sum of squared differences along the path
  WarpingPath path;
};

struct DtwOptions {
  /// Sakoe-Chiba half-width. Widened to at least ||A| - |B|| so the end
  /// cell stays reachable. Unset means no band.
  std::optional<std::size_t> band;
};

/// Classic DTW with symmetric steps and squared-difference cost.
/// Backtracking prefers the diagonal, then the step that advanced the source
/// index, then the step that advanced the base index.
DtwResult dtw(std::span<const double> a, std::span<const double> b,
              const DtwOptions& options = {});

/// Same distance as `dtw`, using two rolling rows instead of the full table.
double dtw_distance(std::span<const double> a, std::span<const double> b,
                    const DtwOptions& options = {});

/// Warps `source` onto `base`: the result has |base| values, each the mean of
/// the source values matched to that base index. Base indices left unmatched
/// (only possible with a band) are linearly interpolated from defined
/// neighbours.
Signal warp_signal(std::span<const double> source, std::span<const double> base,
                   const DtwOptions& options = {});

/// The averaging and interpolation step of `warp_signal` for a given path.
Signal warp_along(std::span<const double> source, const WarpingPath& path,
                  std::size_t base_length);

/// Warps every sub-signal of `s` onto the corresponding base sub-signal.
/// Metadata is copied from `s`.
TrajectorySample warp(const TrajectorySample& s, const MultiSignal& base,
                      const DtwOptions& options = {});

/// Counts base indices without any matched source index in the optimal path.
std::size_t unmatched_base_indices(const WarpingPath& path, std::size_t base_length);

}  // namespace skelwarp
