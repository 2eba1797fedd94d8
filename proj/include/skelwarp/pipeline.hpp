#pragma once

// End-to-end recognizer: preprocessing, templates, wavelet features and the
// forest, trained from one set of sequences.

#include <optional>
#include <span>
#include <string>

#include "skelwarp/config.hpp"
#include "skelwarp/dataset.hpp"
#include "skelwarp/features.hpp"
#include "skelwarp/forest.hpp"
#include "skelwarp/templates.hpp"

namespace skelwarp {

/// Align every frame, build sub-signals padded to `max_objects`, smooth.
TrajectorySample preprocess(const RawSequence& seq, const SkeletonLayout& layout,
                            const FilterParams& filter, std::size_t max_objects);

struct Prediction {
  int label = 0;
  std::vector<int> class_labels;
  std::vector<double> fractions;  // vote fraction per class label
};

struct TrainedModel {
  SkeletonLayout layout;
  PipelineConfig config;
  std::vector<std::string> class_names;
  std::size_t max_objects = 0;
  bool mirroring = false;
  std::vector<ActionTemplate> templates;
  /// Per template, the lengths of the mean-sample sub-signals it was built on.
  std::vector<std::vector<std::size_t>> mean_sample_lengths;
  WaveletSpec wavelet;
  std::optional<TuningResult> tuning;
  ForestModel forest;
  /// Provenance: uids of every sequence that influenced the model.
  std::vector<std::uint64_t> training_uids;
  std::vector<std::string> warnings;

  std::size_t feature_dimension() const noexcept { return forest.feature_dimension(); }

  FeatureVector features(const RawSequence& seq, unsigned jobs = 1) const;
  Prediction predict(const RawSequence& seq, unsigned jobs = 1) const;
};

struct TrainOptions {
  unsigned jobs = 1;
  /// Mirroring fallback when the config leaves it unset.
  bool default_mirroring = false;
};

/// Trains on `train` only. Class labels must lie in 1..class_names.size().
TrainedModel train_model(std::span<const RawSequence> train, const SkeletonLayout& layout,
                         const std::vector<std::string>& class_names,
                         const PipelineConfig& config, const TrainOptions& options = {});

/// Mirroring is on by default for CAD-60 style data only.
bool default_mirroring(DatasetFormat format) noexcept;

}  // namespace skelwarp
