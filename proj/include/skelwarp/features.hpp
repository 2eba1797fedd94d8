#pragma once

#include <span>

#include "skelwarp/forest.hpp"
#include "skelwarp/templates.hpp"
#include "skelwarp/wavelet.hpp"

namespace skelwarp {

/// Concatenates, for each warped signal nu and sub-signal k in order, the
/// blocks [A_L, D_L, ..., D_1] of its wavelet decomposition. Short signals
/// stop decomposing early (empty detail blocks), so the layout depends only
/// on the template lengths and the spec.
FeatureVector feature_vector(const WarpedSampleSet& warped, const WaveletSpec& spec);

/// Length of `feature_vector` for signals warped onto `templates`.
std::size_t feature_length(std::span<const ActionTemplate> templates,
                           const WaveletSpec& spec);

/// True when some template sub-signal is too short for `spec` to run every
/// level (decomposition will stop early).
bool truncates(std::span<const ActionTemplate> templates, const WaveletSpec& spec);

/// Grid cells in tie-break order: levels {1, 3, 5} outer, families
/// Daubechies, Coiflet, Symlet inner, each at its default order.
std::vector<WaveletSpec> default_tuning_grid();

struct TuningOptions {
  std::vector<WaveletSpec> grid = default_tuning_grid();
  ForestParams forest;
  unsigned jobs = 1;
};

struct TuningResult {
  WaveletSpec best;
  /// Mean two-way accuracy per grid cell, aligned with the grid.
  std::vector<double> scores;
  /// Subjects assigned to the first group; the rest form the second.
  std::vector<int> first_group;
};

/// Splits the training subjects into two groups (sorted ids, alternating),
/// trains on one group and scores on the other in both directions for every
/// grid cell, and returns the first cell with the best mean accuracy.
/// Throws InsufficientSubjects with fewer than two distinct subjects.
TuningResult tune_wavelet(std::span<const WarpedSampleSet> warped,
                          std::span<const int> labels, std::span<const int> subjects,
                          const TuningOptions& options);

}  // namespace skelwarp
