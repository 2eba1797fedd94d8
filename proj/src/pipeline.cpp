#include "skelwarp/pipeline.hpp"

#include <algorithm>

#include "skelwarp/error.hpp"
#include "skelwarp/filtering.hpp"
#include "skelwarp/parallel.hpp"

namespace skelwarp {

bool default_mirroring(DatasetFormat format) noexcept {
  return format == DatasetFormat::Cad60;
}

TrajectorySample preprocess(const RawSequence& seq, const SkeletonLayout& layout,
                            const FilterParams& filter, std::size_t max_objects) {
  if (!seq.frames.empty() && seq.frames.front().joints.size() != layout.num_joints()) {
    throw Error(ErrorKind::DimensionMismatch,
                "sequence has " + std::to_string(seq.frames.front().joints.size()) +
                    " joints, layout '" + layout.name + "' has " +
                    std::to_string(layout.num_joints()));
  }
  const RawSequence aligned = align_sequence(seq, layout.orientation);
  return smooth_sample(to_trajectory_sample(aligned, max_objects), filter);
}

FeatureVector TrainedModel::features(const RawSequence& seq, unsigned jobs) const {
  const TrajectorySample s = preprocess(seq, layout, config.filter, max_objects);
  TemplateOptions opts;
  opts.dtw.band = config.dtw_band;
  opts.jobs = jobs;
  return feature_vector(warp_to_templates(s, templates, opts), wavelet);
}

Prediction TrainedModel::predict(const RawSequence& seq, unsigned jobs) const {
  const FeatureVector x = features(seq, jobs);
  Prediction p;
  p.label = forest.predict(x);
  p.class_labels = forest.class_labels();
  p.fractions = forest.predict_proba(x);
  return p;
}

TrainedModel train_model(std::span<const RawSequence> train, const SkeletonLayout& layout,
                         const std::vector<std::string>& class_names,
                         const PipelineConfig& config, const TrainOptions& options) {
  if (train.empty()) throw Error(ErrorKind::DegenerateData, "no training sequences");
  validate(config.filter);

  TrainedModel model;
  model.layout = layout;
  model.config = config;
  model.class_names = class_names;
  model.mirroring = config.mirroring.value_or(options.default_mirroring);

  std::size_t most_objects = 0;
  for (const auto& seq : train) {
    if (seq.class_label < 1 || seq.class_label > static_cast<int>(class_names.size())) {
      throw Error(ErrorKind::LabelMapError,
                  "class label " + std::to_string(seq.class_label) + " has no name");
    }
    if (!seq.frames.empty()) most_objects = std::max(most_objects, seq.frames.front().objects.size());
    model.training_uids.push_back(seq.uid);
  }
  model.max_objects = config.max_objects.value_or(most_objects);

  std::vector<TrajectorySample> samples(train.size());
  parallel_for(train.size(), options.jobs, [&](std::size_t i) {
    samples[i] = preprocess(train[i], layout, config.filter, model.max_objects);
  });

  TemplateOptions topts;
  topts.dtw.band = config.dtw_band;
  topts.jobs = options.jobs;
  model.templates = model.mirroring ? build_templates_mirrored(samples, layout.symmetry, topts)
                                    : build_templates(samples, topts);
  for (const auto& t : model.templates) model.mean_sample_lengths.push_back(t.lengths());

  if (model.mirroring) {
    const std::size_t n = samples.size();
    for (std::size_t i = 0; i < n; ++i) samples.push_back(mirror_sample(samples[i], layout.symmetry));
  }

  std::vector<WarpedSampleSet> warped(samples.size());
  TemplateOptions serial = topts;
  serial.jobs = 1;
  parallel_for(samples.size(), options.jobs, [&](std::size_t i) {
    warped[i] = warp_to_templates(samples[i], model.templates, serial);
  });

  std::vector<int> labels;
  std::vector<int> subjects;
  for (const auto& s : samples) {
    labels.push_back(s.class_label);
    subjects.push_back(s.subject_id);
  }

  model.wavelet = config.wavelet;
  if (config.autotune) {
    TuningOptions tune;
    tune.forest = config.forest;
    tune.jobs = options.jobs;
    try {
      model.tuning = tune_wavelet(warped, labels, subjects, tune);
      model.wavelet = model.tuning->best;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientSubjects) throw;
      model.warnings.push_back("wavelet tuning skipped (" + std::string(e.what()) +
                               "); using " + to_string(config.wavelet));
    }
  }
  if (truncates(model.templates, model.wavelet)) {
    model.warnings.push_back("some templates are too short for " + to_string(model.wavelet) +
                             "; their decomposition stops early");
  }

  std::vector<FeatureVector> x(samples.size());
  parallel_for(samples.size(), options.jobs,
               [&](std::size_t i) { x[i] = feature_vector(warped[i], model.wavelet); });
  model.forest = train_forest(x, labels, config.forest, options.jobs);
  return model;
}

}  // namespace skelwarp
