#pragma once

// Random decision forest: unpruned Gini trees grown on bootstrap resamples
// with a random feature subset per split, predicting by majority vote.

#include <cstdint>
#include <limits>
#include <json.hpp>
#include <span>
#include <vector>

namespace skelwarp {

using FeatureVector = std::vector<double>;

struct ForestParams {
  int n_trees = 500;
  /// Candidate features per split; 0 selects ceil(sqrt(D)).
  int features_per_split = 0;
  /// 0 means unlimited depth.
  int max_depth = 0;
  int min_samples_leaf = 1;
  std::uint64_t seed = 0x5EED;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;   // x[feature] <= threshold
  int right = -1;
  std::vector<int> histogram;  // leaves only, indexed by class position
};

struct DecisionTree {
  std::vector<TreeNode> nodes;

  /// Class position voted by the leaf reached by x.
  int vote(std::span<const double> x) const;
  int depth() const;
};

class ForestModel {
 public:
  ForestModel() = default;
  ForestModel(std::vector<DecisionTree> trees, std::vector<int> class_labels,
              ForestParams params, std::size_t feature_dimension);

  int predict(std::span<const double> x) const;
  /// Fraction of trees voting for each class, aligned with class_labels().
  std::vector<double> predict_proba(std::span<const double> x) const;
  std::vector<int> votes(std::span<const double> x) const;

  const std::vector<int>& class_labels() const noexcept { return class_labels_; }
  const std::vector<DecisionTree>& trees() const noexcept { return trees_; }
  const ForestParams& params() const noexcept { return params_; }
  std::size_t feature_dimension() const noexcept { return feature_dimension_; }

  /// Out-of-bag error measured during training (NaN if never computed).
  double oob_error() const noexcept { return oob_error_; }
  void set_oob_error(double e) noexcept { oob_error_ = e; }

  nlohmann::json to_json() const;
  static ForestModel from_json(const nlohmann::json& j);

 private:
  void check_dimension(std::span<const double> x) const;

  std::vector<DecisionTree> trees_;
  std::vector<int> class_labels_;
  ForestParams params_;
  std::size_t feature_dimension_ = 0;
  double oob_error_ = std::numeric_limits<double>::quiet_NaN();
};

/// Throws DegenerateData for empty input. A single class yields a forest that
/// always predicts it.
ForestModel train_forest(const std::vector<FeatureVector>& features,
                         std::span<const int> labels, const ForestParams& params,
                         unsigned jobs = 1);

}  // namespace skelwarp
