#include "skelwarp/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

#include "skelwarp/error.hpp"
#include "skelwarp/parallel.hpp"
#include "skelwarp/random.hpp"

namespace skelwarp {
namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;  // weighted Gini times node size
};

int argmax_lowest(std::span<const int> counts) {
  int best = 0;
  for (int c = 1; c < static_cast<int>(counts.size()); ++c) {
    if (counts[c] > counts[best]) best = c;
  }
  return best;
}

double gini_mass(std::span<const int> counts, int total) {
  if (total == 0) return 0.0;
  double sum_sq = 0.0;
  for (int c : counts) sum_sq += static_cast<double>(c) * c;
  return total - sum_sq / total;
}

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<FeatureVector>& x, std::span<const int> y,
              std::size_t num_classes, const ForestParams& params, std::size_t mtry,
              Rng& rng)
      : x_(x), y_(y), classes_(num_classes), params_(params), mtry_(mtry), rng_(rng) {}

  DecisionTree build(std::vector<std::size_t> rows) {
    DecisionTree tree;
    grow(tree, std::move(rows), 0);
    return tree;
  }

 private:
  int grow(DecisionTree& tree, std::vector<std::size_t> rows, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    std::vector<int> counts(classes_, 0);
    for (std::size_t r : rows) ++counts[static_cast<std::size_t>(y_[r])];
    const auto pure = std::count_if(counts.begin(), counts.end(),
                                    [](int c) { return c > 0; }) <= 1;
    const bool depth_limited = params_.max_depth > 0 && depth >= params_.max_depth;
    const auto min_leaf = static_cast<std::size_t>(std::max(params_.min_samples_leaf, 1));

    std::optional<Split> split;
    if (!pure && !depth_limited && rows.size() >= 2 * min_leaf) {
      split = best_split(rows, counts, min_leaf);
    }
    if (!split) {
      tree.nodes[id].histogram = std::move(counts);
      return id;
    }

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t r : rows) {
      (x_[r][split->feature] <= split->threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    tree.nodes[id].feature = split->feature;
    tree.nodes[id].threshold = split->threshold;
    const int l = grow(tree, std::move(left), depth + 1);
    const int r = grow(tree, std::move(right), depth + 1);
    tree.nodes[id].left = l;
    tree.nodes[id].right = r;
    return id;
  }

  // Visits features in random order until `mtry` non-constant ones have been
  // examined, so constant features never waste a candidate slot.
  std::optional<Split> best_split(const std::vector<std::size_t>& rows,
                                  const std::vector<int>& counts, std::size_t min_leaf) {
    const std::size_t dim = x_.front().size();
    std::vector<std::size_t> order(dim);
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::optional<Split> best;
    std::vector<std::pair<double, int>> column(rows.size());
    std::vector<int> left_counts(classes_);
    std::size_t examined = 0;
    const int n = static_cast<int>(rows.size());

    for (std::size_t drawn = 0; drawn < dim && examined < mtry_; ++drawn) {
      const std::size_t pick = drawn + rng_.index(dim - drawn);
      std::swap(order[drawn], order[pick]);
      const std::size_t f = order[drawn];

      for (std::size_t i = 0; i < rows.size(); ++i) {
        column[i] = {x_[rows[i]][f], y_[rows[i]]};
      }
      std::sort(column.begin(), column.end());
      if (column.front().first == column.back().first) continue;
      ++examined;

      std::fill(left_counts.begin(), left_counts.end(), 0);
      std::vector<int> right_counts = counts;
      for (int i = 0; i + 1 < n; ++i) {
        const auto c = static_cast<std::size_t>(column[i].second);
        ++left_counts[c];
        --right_counts[c];
        const double lo = column[i].first;
        const double hi = column[i + 1].first;
        if (lo == hi) continue;
        const int nl = i + 1;
        const int nr = n - nl;
        if (static_cast<std::size_t>(nl) < min_leaf || static_cast<std::size_t>(nr) < min_leaf) {
          continue;
        }
        const double impurity = gini_mass(left_counts, nl) + gini_mass(right_counts, nr);
        double threshold = lo + (hi - lo) / 2.0;
        if (!(threshold < hi)) threshold = lo;
        const int feature = static_cast<int>(f);
        const bool better =
            !best || impurity < best->impurity ||
            (impurity == best->impurity &&
             (feature < best->feature ||
              (feature == best->feature && threshold < best->threshold)));
        if (better) best = Split{feature, threshold, impurity};
      }
    }
    return best;
  }

  const std::vector<FeatureVector>& x_;
  std::span<const int> y_;
  std::size_t classes_;
  const ForestParams& params_;
  std::size_t mtry_;
  Rng& rng_;
};

}  // namespace

int DecisionTree::vote(std::span<const double> x) const {
  int id = 0;
  while (nodes[id].feature >= 0) {
    const TreeNode& node = nodes[id];
    id = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return argmax_lowest(nodes[id].histogram);
}

int DecisionTree::depth() const {
  std::vector<std::pair<int, int>> stack{{0, 0}};
  int deepest = 0;
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (nodes[id].feature >= 0) {
      stack.emplace_back(nodes[id].left, d + 1);
      stack.emplace_back(nodes[id].right, d + 1);
    }
  }
  return deepest;
}

ForestModel::ForestModel(std::vector<DecisionTree> trees, std::vector<int> class_labels,
                         ForestParams params, std::size_t feature_dimension)
    : trees_(std::move(trees)),
      class_labels_(std::move(class_labels)),
      params_(params),
      feature_dimension_(feature_dimension) {}

void ForestModel::check_dimension(std::span<const double> x) const {
  if (x.size() != feature_dimension_) {
    throw Error(ErrorKind::DimensionMismatch,
                "feature vector has " + std::to_string(x.size()) +
                    " values, forest expects " + std::to_string(feature_dimension_));
  }
}

std::vector<int> ForestModel::votes(std::span<const double> x) const {
  check_dimension(x);
  std::vector<int> v(class_labels_.size(), 0);
  for (const auto& t : trees_) ++v[static_cast<std::size_t>(t.vote(x))];
  return v;
}

int ForestModel::predict(std::span<const double> x) const {
  const auto v = votes(x);
  return class_labels_[static_cast<std::size_t>(argmax_lowest(v))];
}

std::vector<double> ForestModel::predict_proba(std::span<const double> x) const {
  const auto v = votes(x);
  std::vector<double> p(v.size());
  const double total = static_cast<double>(trees_.size());
  for (std::size_t c = 0; c < v.size(); ++c) p[c] = v[c] / total;
  return p;
}

nlohmann::json ForestModel::to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : trees_) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : t.nodes) {
      if (n.feature < 0) {
        nodes.push_back({{"leaf", n.histogram}});
      } else {
        nodes.push_back({{"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right}});
      }
    }
    trees.push_back(std::move(nodes));
  }
  nlohmann::json j;
  j["class_labels"] = class_labels_;
  j["feature_dimension"] = feature_dimension_;
  j["params"] = {{"n_trees", params_.n_trees},
                 {"features_per_split", params_.features_per_split},
                 {"max_depth", params_.max_depth},
                 {"min_samples_leaf", params_.min_samples_leaf},
                 {"seed", params_.seed}};
  if (!std::isnan(oob_error_)) j["oob_error"] = oob_error_;
  j["trees"] = std::move(trees);
  return j;
}

namespace {

ForestModel forest_from_json(const nlohmann::json& j) {
  ForestParams p;
  const auto& jp = j.at("params");
  p.n_trees = jp.at("n_trees").get<int>();
  p.features_per_split = jp.at("features_per_split").get<int>();
  p.max_depth = jp.at("max_depth").get<int>();
  p.min_samples_leaf = jp.at("min_samples_leaf").get<int>();
  p.seed = jp.at("seed").get<std::uint64_t>();

  const auto labels = j.at("class_labels").get<std::vector<int>>();
  const auto dim = j.at("feature_dimension").get<std::size_t>();
  std::vector<DecisionTree> trees;
  for (const auto& jt : j.at("trees")) {
    DecisionTree t;
    for (const auto& jn : jt) {
      TreeNode n;
      if (jn.contains("leaf")) {
        n.histogram = jn.at("leaf").get<std::vector<int>>();
        if (n.histogram.size() != labels.size()) {
          throw Error(ErrorKind::CorruptBundle, "leaf histogram size mismatch");
        }
      } else {
        n.feature = jn.at("feature").get<int>();
        n.threshold = jn.at("threshold").get<double>();
        n.left = jn.at("left").get<int>();
        n.right = jn.at("right").get<int>();
      }
      t.nodes.push_back(std::move(n));
    }
    const auto count = static_cast<int>(t.nodes.size());
    // Children always follow their parent, which also rules out cycles.
    for (int i = 0; i < count; ++i) {
      const TreeNode& n = t.nodes[static_cast<std::size_t>(i)];
      if (n.feature >= 0 && (n.feature >= static_cast<int>(dim) || n.left <= i ||
                             n.right <= i || n.left >= count || n.right >= count)) {
        throw Error(ErrorKind::CorruptBundle, "tree node out of range");
      }
    }
    if (t.nodes.empty()) throw Error(ErrorKind::CorruptBundle, "empty tree");
    trees.push_back(std::move(t));
  }
  ForestModel m(std::move(trees), labels, p, dim);
  if (j.contains("oob_error")) m.set_oob_error(j.at("oob_error").get<double>());
  return m;
}

}  // namespace

ForestModel ForestModel::from_json(const nlohmann::json& j) {
  try {
    return forest_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::CorruptBundle, std::string("malformed forest: ") + e.what());
  }
}

ForestModel train_forest(const std::vector<FeatureVector>& features,
                         std::span<const int> labels, const ForestParams& params,
                         unsigned jobs) {
  if (features.empty() || features.size() != labels.size()) {
    throw Error(ErrorKind::DegenerateData,
                "forest needs a non-empty training set with one label per row");
  }
  if (params.n_trees < 1) {
    throw Error(ErrorKind::InvalidArgument, "forest needs at least one tree");
  }
  const std::size_t dim = features.front().size();
  for (const auto& f : features) {
    if (f.size() != dim) {
      throw Error(ErrorKind::DimensionMismatch, "feature vectors differ in length");
    }
  }
  if (dim == 0) throw Error(ErrorKind::DegenerateData, "feature vectors are empty");

  std::vector<int> classes(labels.begin(), labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  std::vector<int> positions(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    positions[i] = static_cast<int>(
        std::lower_bound(classes.begin(), classes.end(), labels[i]) - classes.begin());
  }

  std::size_t mtry = params.features_per_split > 0
                         ? static_cast<std::size_t>(params.features_per_split)
                         : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(dim))));
  if (mtry > dim) {
    throw Error(ErrorKind::InvalidArgument,
                "features_per_split exceeds the feature dimension");
  }

  const std::size_t n = features.size();
  const auto n_trees = static_cast<std::size_t>(params.n_trees);
  std::vector<DecisionTree> trees(n_trees);
  std::vector<std::vector<bool>> in_bag(n_trees, std::vector<bool>(n, false));
  parallel_for(n_trees, jobs, [&](std::size_t t) {
    Rng rng(derive_seed(params.seed, t));
    std::vector<std::size_t> rows(n);
    for (auto& r : rows) {
      r = static_cast<std::size_t>(rng.index(n));
      in_bag[t][r] = true;
    }
    TreeBuilder builder(features, positions, classes.size(), params, mtry, rng);
    trees[t] = builder.build(std::move(rows));
  });

  ForestModel model(std::move(trees), classes, params, dim);

  std::size_t scored = 0;
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<int> votes(classes.size(), 0);
    bool any = false;
    for (std::size_t t = 0; t < n_trees; ++t) {
      if (in_bag[t][i]) continue;
      ++votes[static_cast<std::size_t>(model.trees()[t].vote(features[i]))];
      any = true;
    }
    if (!any) continue;
    ++scored;
    if (argmax_lowest(votes) != positions[i]) ++wrong;
  }
  if (scored > 0) model.set_oob_error(static_cast<double>(wrong) / static_cast<double>(scored));
  return model;
}

}  // namespace skelwarp
