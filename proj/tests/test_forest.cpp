#include <doctest.h>

#include <random>

#include "skelwarp/forest.hpp"
#include "test_util.hpp"

using namespace skelwarp;

namespace {

struct Data {
  std::vector<FeatureVector> x;
  std::vector<int> y;
};

// Label 1 for x0 < 0, label 2 for x0 > 0 with a 0.05 margin, plus
// `noise_dims` distractors.
Data separable(std::mt19937_64& rng, std::size_t n, std::size_t noise_dims = 0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Data d;
  while (d.x.size() < n) {
    const double v = u(rng);
    if (std::abs(v) < 0.05) continue;
    FeatureVector f{v};
    for (std::size_t i = 0; i < noise_dims; ++i) f.push_back(u(rng));
    d.x.push_back(f);
    d.y.push_back(v < 0 ? 1 : 2);
  }
  return d;
}

TreeNode leaf(std::vector<int> histogram) {
  TreeNode n;
  n.histogram = std::move(histogram);
  return n;
}

}  // namespace

TEST_CASE("separable 1-D data is learned") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed);
    const Data train = separable(rng, 200);
    const Data test = separable(rng, 200);
    ForestParams p;
    p.n_trees = 50;
    p.seed = seed;
    const ForestModel m = train_forest(train.x, train.y, p);
    int correct = 0;
    for (std::size_t i = 0; i < test.x.size(); ++i) correct += m.predict(test.x[i]) == test.y[i];
    CHECK(correct >= 198);
    CHECK(m.oob_error() < 0.05);
  }
}

TEST_CASE("a single class always wins") {
  const std::vector<FeatureVector> x{{1.0}, {2.0}, {3.0}};
  const std::vector<int> y{4, 4, 4};
  ForestParams p;
  p.n_trees = 5;
  const ForestModel m = train_forest(x, y, p);
  CHECK(m.class_labels() == std::vector<int>{4});
  CHECK(m.predict(FeatureVector{-100.0}) == 4);
  CHECK(m.predict_proba(FeatureVector{0.5}) == std::vector<double>{1.0});
}

TEST_CASE("training is deterministic and independent of the job count") {
  std::mt19937_64 rng(3);
  const Data d = separable(rng, 120, 5);
  ForestParams p;
  p.n_trees = 40;
  p.seed = 77;
  const std::string a = train_forest(d.x, d.y, p, 1).to_json().dump();
  const std::string b = train_forest(d.x, d.y, p, 1).to_json().dump();
  const std::string c = train_forest(d.x, d.y, p, 4).to_json().dump();
  CHECK(a == b);
  CHECK(a == c);
  p.seed = 78;
  CHECK(train_forest(d.x, d.y, p, 1).to_json().dump() != a);
}

TEST_CASE("vote ties go to the smallest class label") {
  DecisionTree for2;
  for2.nodes = {leaf({1, 0})};
  DecisionTree for5;
  for5.nodes = {leaf({0, 1})};
  const ForestModel m({for5, for2}, {2, 5}, ForestParams{}, 1);
  CHECK(m.predict(FeatureVector{0.0}) == 2);
  CHECK(m.votes(FeatureVector{0.0}) == std::vector<int>{1, 1});
  // Leaf histogram ties resolve the same way.
  DecisionTree tied;
  tied.nodes = {leaf({3, 3})};
  CHECK(tied.vote(FeatureVector{0.0}) == 0);
}

TEST_CASE("single-tree forest follows its leaf") {
  DecisionTree t;
  TreeNode root;
  root.feature = 0;
  root.threshold = 0.5;
  root.left = 1;
  root.right = 2;
  t.nodes = {root, leaf({2, 1}), leaf({0, 4})};
  const ForestModel m({t}, {1, 2}, ForestParams{}, 1);
  CHECK(m.predict(FeatureVector{0.5}) == 1);
  CHECK(m.predict(FeatureVector{0.6}) == 2);
  CHECK(m.predict_proba(FeatureVector{0.6}) == std::vector<double>{0.0, 1.0});
  CHECK(t.depth() == 1);
}

TEST_CASE("predict_proba sums to one and agrees with predict") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<FeatureVector> x;
  std::vector<int> y;
  for (int i = 0; i < 150; ++i) {
    const int label = 1 + i % 3;
    x.push_back({n(rng) + label, n(rng), n(rng) - label});
    y.push_back(label);
  }
  ForestParams p;
  p.n_trees = 31;
  const ForestModel m = train_forest(x, y, p);
  for (int i = 0; i < 200; ++i) {
    const FeatureVector q{3 * n(rng), 3 * n(rng), 3 * n(rng)};
    const auto proba = m.predict_proba(q);
    double sum = 0.0;
    for (double v : proba) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    const auto best = std::max_element(proba.begin(), proba.end()) - proba.begin();
    CHECK(m.predict(q) == m.class_labels()[static_cast<std::size_t>(best)]);
  }
}

TEST_CASE("constant features give near-uniform votes over the observed classes") {
  const std::vector<FeatureVector> x(90, FeatureVector{1.0, 1.0});
  std::vector<int> y;
  for (int i = 0; i < 90; ++i) y.push_back(1 + i % 3);
  ForestParams p;
  p.n_trees = 600;
  const ForestModel m = train_forest(x, y, p);
  for (const auto& t : m.trees()) CHECK(t.nodes.size() == 1);
  for (double f : m.predict_proba(FeatureVector{1.0, 1.0})) CHECK(std::abs(f - 1.0 / 3.0) < 0.1);
}

TEST_CASE("training points of a deep forest are recovered") {
  int hits = 0;
  int total = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<FeatureVector> x;
    std::vector<int> y;
    for (int i = 0; i < 60; ++i) {
      x.push_back({n(rng), n(rng), n(rng), n(rng)});
      y.push_back(1 + i % 4);
    }
    ForestParams p;
    p.n_trees = 100;
    p.seed = seed;
    const ForestModel m = train_forest(x, y, p);
    for (std::size_t i = 0; i < x.size(); ++i) {
      hits += m.predict(x[i]) == y[i];
      ++total;
    }
  }
  CHECK(static_cast<double>(hits) / total >= 0.95);
}

TEST_CASE("tree structure respects the parameters") {
  std::mt19937_64 rng(6);
  const Data d = separable(rng, 200, 3);
  ForestParams p;
  p.n_trees = 10;
  p.max_depth = 2;
  p.min_samples_leaf = 5;
  const ForestModel m = train_forest(d.x, d.y, p);
  for (const auto& t : m.trees()) {
    CHECK(t.depth() <= 2);
    for (const auto& node : t.nodes) {
      if (node.feature >= 0) continue;
      int count = 0;
      for (int c : node.histogram) count += c;
      CHECK(count >= 5);
    }
  }
}

TEST_CASE("forest errors") {
  ForestParams p;
  p.n_trees = 3;
  CHECK_ERROR_KIND(train_forest({}, std::vector<int>{}, p), ErrorKind::DegenerateData);
  CHECK_ERROR_KIND(train_forest({{1.0}}, std::vector<int>{1, 2}, p), ErrorKind::DegenerateData);
  CHECK_ERROR_KIND(train_forest({{1.0}, {1.0, 2.0}}, std::vector<int>{1, 2}, p),
                   ErrorKind::DimensionMismatch);
  p.features_per_split = 3;
  CHECK_ERROR_KIND(train_forest({{1.0}, {2.0}}, std::vector<int>{1, 2}, p), ErrorKind::InvalidArgument);
  p.features_per_split = 0;
  const ForestModel m = train_forest({{1.0}, {2.0}}, std::vector<int>{1, 2}, p);
  CHECK_ERROR_KIND(m.predict(FeatureVector{1.0, 2.0}), ErrorKind::DimensionMismatch);
  CHECK_ERROR_KIND(m.predict_proba(FeatureVector{}), ErrorKind::DimensionMismatch);
}

TEST_CASE("serialization round trip") {
  std::mt19937_64 rng(8);
  const Data d = separable(rng, 80, 2);
  ForestParams p;
  p.n_trees = 12;
  const ForestModel m = train_forest(d.x, d.y, p);
  const ForestModel back = ForestModel::from_json(m.to_json());
  CHECK(back.to_json().dump() == m.to_json().dump());
  for (const auto& x : d.x) CHECK(back.predict_proba(x) == m.predict_proba(x));

  auto broken = m.to_json();
  REQUIRE(broken["trees"][0][0].contains("left"));
  broken["trees"][0][0]["left"] = 9999;
  CHECK_ERROR_KIND(ForestModel::from_json(broken), ErrorKind::CorruptBundle);
  CHECK_ERROR_KIND(ForestModel::from_json(nlohmann::json::object()), ErrorKind::CorruptBundle);
}
