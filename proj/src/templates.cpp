#include "skelwarp/templates.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "skelwarp/error.hpp"
#include "skelwarp/parallel.hpp"

namespace skelwarp {
namespace {

void check_class(std::span<const TrajectorySample> samples) {
  if (samples.empty()) {
    throw Error(ErrorKind::EmptyClass, "class has no training samples");
  }
  const std::size_t dim = samples.front().dimension();
  for (const auto& s : samples) {
    if (s.dimension() != dim) {
      throw Error(ErrorKind::DimensionMismatch,
                  "samples of one class disagree on K");
    }
  }
}

}  // namespace

std::vector<std::size_t> ActionTemplate::lengths() const {
  std::vector<std::size_t> out;
  out.reserve(sub_signals.size());
  for (const auto& s : sub_signals) out.push_back(s.size());
  return out;
}

MeanSample mean_sample(std::span<const TrajectorySample> samples,
                       const TemplateOptions& options) {
  check_class(samples);
  const std::size_t n = samples.size();
  const std::size_t dim = samples.front().dimension();

  MeanSample mean;
  mean.class_label = samples.front().class_label;
  mean.sub_signals.resize(dim);
  mean.source_sample.resize(dim);

  parallel_for(dim, options.jobs, [&](std::size_t k) {
    std::vector<double> dist(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t jj = j + 1; jj < n; ++jj) {
        const double d = dtw_distance(samples[j].sub_signals[k],
                                      samples[jj].sub_signals[k], options.dtw);
        dist[j * n + jj] = d;
        dist[jj * n + j] = d;
      }
    }
    std::size_t best = 0;
    double best_total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double total = 0.0;
      for (std::size_t jj = 0; jj < n; ++jj) total += dist[j * n + jj];
      if (j == 0 || total < best_total) {
        best = j;
        best_total = total;
      }
    }
    mean.sub_signals[k] = samples[best].sub_signals[k];
    mean.source_sample[k] = best;
  });
  return mean;
}

ActionTemplate build_template(std::span<const TrajectorySample> samples,
                              const MeanSample& mean,
                              const TemplateOptions& options) {
  check_class(samples);
  if (samples.front().dimension() != mean.sub_signals.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "mean-sample and class samples disagree on K");
  }
  std::vector<TrajectorySample> warped(samples.size());
  parallel_for(samples.size(), options.jobs, [&](std::size_t j) {
    warped[j] = warp(samples[j], mean.sub_signals, options.dtw);
  });

  ActionTemplate tpl;
  tpl.class_label = mean.class_label;
  tpl.sub_signals.resize(mean.sub_signals.size());
  const double count = static_cast<double>(samples.size());
  for (std::size_t k = 0; k < mean.sub_signals.size(); ++k) {
    const std::size_t len = mean.sub_signals[k].size();
    Signal& out = tpl.sub_signals[k];
    out.assign(len, 0.0);
    for (std::size_t l = 0; l < len; ++l) {
      double sum = 0.0;
      double lo = warped.front().sub_signals[k][l];
      double hi = lo;
      for (const auto& w : warped) {
        const double v = w.sub_signals[k][l];
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      // Rounding in the sum must not push the mean outside the data range.
      out[l] = std::clamp(sum / count, lo, hi);
    }
  }
  return tpl;
}

WarpedSampleSet warp_to_templates(const TrajectorySample& s,
                                  std::span<const ActionTemplate> templates,
                                  const TemplateOptions& options) {
  WarpedSampleSet set;
  set.warped.resize(templates.size());
  parallel_for(templates.size(), options.jobs, [&](std::size_t v) {
    set.warped[v] = warp(s, templates[v].sub_signals, options.dtw);
  });
  return set;
}

std::vector<ActionTemplate> build_templates(std::span<const TrajectorySample> samples,
                                            const TemplateOptions& options) {
  std::map<int, std::vector<TrajectorySample>> by_class;
  for (const auto& s : samples) by_class[s.class_label].push_back(s);
  if (by_class.empty()) {
    throw Error(ErrorKind::EmptyClass, "no training samples");
  }
  std::vector<ActionTemplate> out;
  out.reserve(by_class.size());
  for (const auto& [label, members] : by_class) {
    const MeanSample mean = mean_sample(members, options);
    out.push_back(build_template(members, mean, options));
  }
  return out;
}

std::vector<ActionTemplate> build_templates_mirrored(
    std::span<const TrajectorySample> samples, const SymmetryMap& map,
    const TemplateOptions& options) {
  std::vector<TrajectorySample> mirrored;
  mirrored.reserve(samples.size());
  for (const auto& s : samples) mirrored.push_back(mirror_sample(s, map));

  std::vector<ActionTemplate> out = build_templates(samples, options);
  std::vector<ActionTemplate> flipped = build_templates(mirrored, options);
  for (auto& t : flipped) {
    t.mirrored = true;
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace skelwarp
