#pragma once

// Per-class reference signals: the mean-sample search, template averaging
// and the warping of a sample onto every template.

#include <span>

#include "skelwarp/dtw.hpp"

namespace skelwarp {

struct MeanSample {
  MultiSignal sub_signals;
  /// Index (into the class's sample list) each sub-signal was taken from.
  std::vector<std::size_t> source_sample;
  int class_label = 0;
};

struct ActionTemplate {
  MultiSignal sub_signals;
  int class_label = 0;
  /// Built from the mirrored copy of the training set.
  bool mirrored = false;

  std::vector<std::size_t> lengths() const;
};

/// One warped copy of a sample per template, in template order.
struct WarpedSampleSet {
  std::vector<TrajectorySample> warped;
};

struct TemplateOptions {
  DtwOptions dtw;
  unsigned jobs = 1;
};

/// For each sub-signal index k independently, picks the class sample whose
/// k-th sub-signal has the smallest summed DTW distance to the k-th
/// sub-signals of all samples of the class (ties: lowest sample index).
MeanSample mean_sample(std::span<const TrajectorySample> samples,
                       const TemplateOptions& options = {});

/// Warps every sample onto the mean-sample and averages index-wise.
ActionTemplate build_template(std::span<const TrajectorySample> samples,
                              const MeanSample& mean,
                              const TemplateOptions& options = {});

WarpedSampleSet warp_to_templates(const TrajectorySample& s,
                                  std::span<const ActionTemplate> templates,
                                  const TemplateOptions& options = {});

/// One template per class present in `samples`, ordered by class label.
std::vector<ActionTemplate> build_templates(std::span<const TrajectorySample> samples,
                                            const TemplateOptions& options = {});

/// Doubles the training set with its mirrored copies and builds two templates
/// per class: originals for classes 1..C first, then mirrored for 1..C.
std::vector<ActionTemplate> build_templates_mirrored(
    std::span<const TrajectorySample> samples, const SymmetryMap& map,
    const TemplateOptions& options = {});

}  // namespace skelwarp
