#include "skelwarp/features.hpp"

#include <algorithm>
#include <set>

#include "skelwarp/error.hpp"

namespace skelwarp {

FeatureVector feature_vector(const WarpedSampleSet& warped, const WaveletSpec& spec) {
  FeatureVector out;
  for (const auto& sample : warped.warped) {
    for (const auto& sig : sample.sub_signals) {
      for (const auto& block : wavedec(sig, spec, DepthPolicy::StopEarly)) {
        out.insert(out.end(), block.begin(), block.end());
      }
    }
  }
  return out;
}

std::size_t feature_length(std::span<const ActionTemplate> templates,
                           const WaveletSpec& spec) {
  std::size_t total = 0;
  for (const auto& t : templates) {
    for (const auto& sig : t.sub_signals) {
      for (std::size_t len : wavedec_lengths(sig.size(), spec, DepthPolicy::StopEarly)) {
        total += len;
      }
    }
  }
  return total;
}

bool truncates(std::span<const ActionTemplate> templates, const WaveletSpec& spec) {
  for (const auto& t : templates) {
    for (const auto& sig : t.sub_signals) {
      try {
        wavedec_lengths(sig.size(), spec, DepthPolicy::Strict);
      } catch (const Error&) {
        return true;
      }
    }
  }
  return false;
}

std::vector<WaveletSpec> default_tuning_grid() {
  std::vector<WaveletSpec> grid;
  for (int levels : {1, 3, 5}) {
    for (auto family : {WaveletFamily::Daubechies, WaveletFamily::Coiflet,
                        WaveletFamily::Symlet}) {
      grid.push_back({family, default_order(family), levels});
    }
  }
  return grid;
}

namespace {

double directional_accuracy(const std::vector<FeatureVector>& x,
                            std::span<const int> labels,
                            const std::vector<bool>& train_mask,
                            const ForestParams& params, unsigned jobs) {
  std::vector<FeatureVector> train_x;
  std::vector<int> train_y;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (train_mask[i]) {
      train_x.push_back(x[i]);
      train_y.push_back(labels[i]);
    }
  }
  const ForestModel model = train_forest(train_x, train_y, params, jobs);
  std::size_t correct = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (train_mask[i]) continue;
    ++total;
    if (model.predict(x[i]) == labels[i]) ++correct;
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace

TuningResult tune_wavelet(std::span<const WarpedSampleSet> warped,
                          std::span<const int> labels, std::span<const int> subjects,
                          const TuningOptions& options) {
  if (warped.size() != labels.size() || warped.size() != subjects.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "tuning inputs disagree on the number of samples");
  }
  if (options.grid.empty()) {
    throw Error(ErrorKind::InvalidArgument, "wavelet tuning grid is empty");
  }
  const std::set<int> distinct(subjects.begin(), subjects.end());
  if (distinct.size() < 2) {
    throw Error(ErrorKind::InsufficientSubjects,
                "wavelet tuning needs at least two training subjects");
  }

  TuningResult result;
  std::set<int> first;
  std::size_t pos = 0;
  for (int s : distinct) {
    if (pos++ % 2 == 0) first.insert(s);
  }
  result.first_group.assign(first.begin(), first.end());

  std::vector<bool> in_first(warped.size());
  std::vector<bool> in_second(warped.size());
  for (std::size_t i = 0; i < warped.size(); ++i) {
    in_first[i] = first.contains(subjects[i]);
    in_second[i] = !in_first[i];
  }

  for (const auto& spec : options.grid) {
    std::vector<FeatureVector> x;
    x.reserve(warped.size());
    for (const auto& w : warped) x.push_back(feature_vector(w, spec));
    const double a = directional_accuracy(x, labels, in_first, options.forest, options.jobs);
    const double b = directional_accuracy(x, labels, in_second, options.forest, options.jobs);
    result.scores.push_back(0.5 * (a + b));
  }
  const auto best = std::max_element(result.scores.begin(), result.scores.end());
  result.best = options.grid[static_cast<std::size_t>(best - result.scores.begin())];
  return result;
}

}  // namespace skelwarp
