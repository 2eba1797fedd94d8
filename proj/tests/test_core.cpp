#include <doctest.h>

#include <cmath>
#include <random>

#include "skelwarp/core.hpp"
#include "skelwarp/error.hpp"
#include "skelwarp/skeleton.hpp"
#include "test_util.hpp"

using namespace skelwarp;

namespace {

// Three joints: hip centre, left hip, right hip.
OrientationConvention three_joint_ref() { return {0, 1, 2}; }

Frame frame_of(std::vector<Point3> joints, std::vector<Point3> objects = {}) {
  Frame f;
  f.joints = std::move(joints);
  f.objects = std::move(objects);
  return f;
}

Frame random_frame(std::mt19937_64& rng, std::size_t joints, std::size_t objects) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Frame f;
  for (std::size_t j = 0; j < joints; ++j) f.joints.push_back({u(rng), u(rng), u(rng)});
  for (std::size_t o = 0; o < objects; ++o) f.objects.push_back({u(rng), u(rng), u(rng)});
  return f;
}

}  // namespace

TEST_CASE("align_frame translates when hips are already on the x axis") {
  const Frame f = frame_of({{1, 2, 3}, {0.8, 2, 3}, {1.2, 2, 3}}, {{5, 5, 5}});
  const Frame a = align_frame(f, three_joint_ref());
  CHECK(a.joints[0] == Point3{0, 0, 0});
  CHECK(a.joints[1].x == doctest::Approx(-0.2));
  CHECK(a.joints[2].x == doctest::Approx(0.2));
  CHECK(a.objects[0].x == doctest::Approx(4));
  CHECK(a.objects[0].y == doctest::Approx(3));
  CHECK(a.objects[0].z == doctest::Approx(2));
}

TEST_CASE("align_frame rotates a +y hip vector onto +x") {
  // Left hip at (0,-1,0), right hip at (0,1,0): left->right is (0,2,0).
  const Frame f = frame_of({{0, 0, 0}, {0, -1, 0}, {0, 1, 0}}, {{0, 1, 0}});
  const Frame a = align_frame(f, three_joint_ref());
  CHECK(a.joints[2].x == doctest::Approx(1.0));
  CHECK(a.joints[2].y == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(a.objects[0].x == doctest::Approx(1.0));
  CHECK(std::abs(a.objects[0].y) < 1e-12);
}

TEST_CASE("an object at the hip maps to the origin") {
  const Frame f = frame_of({{0.3, -0.4, 0.9}, {0.1, 0.2, 0.9}, {0.5, -1.0, 0.9}},
                           {{0.3, -0.4, 0.9}});
  const Frame a = align_frame(f, three_joint_ref());
  CHECK(std::abs(a.objects[0].x) < 1e-12);
  CHECK(std::abs(a.objects[0].y) < 1e-12);
  CHECK(std::abs(a.objects[0].z) < 1e-12);
}

TEST_CASE("align_frame rejects vertically stacked hips") {
  const Frame f = frame_of({{0, 0, 0}, {1, 1, 0}, {1, 1, 0.5}});
  CHECK_ERROR_KIND(align_frame(f, three_joint_ref()), ErrorKind::DegenerateOrientation);
}

TEST_CASE("hip point falls back to the hip midpoint without a centre joint") {
  OrientationConvention ref;
  ref.left_hip = 0;
  ref.right_hip = 1;
  const Frame f = frame_of({{0, 0, 0}, {2, 4, 6}});
  CHECK(hip_point(f, ref) == Point3{1, 2, 3});
}

TEST_CASE("aligned frames: hip at origin, hips on x, distances preserved") {
  std::mt19937_64 rng(7);
  const auto& layout = openni15_layout();
  for (int trial = 0; trial < 200; ++trial) {
    const Frame f = random_frame(rng, layout.num_joints(), 2);
    const Frame a = align_frame(f, layout.orientation);
    const Point3 hip = hip_point(a, layout.orientation);
    CHECK(std::abs(hip.x) < 1e-9);
    CHECK(std::abs(hip.y) < 1e-9);
    CHECK(std::abs(hip.z) < 1e-9);
    const Point3 l = a.joints[layout.orientation.left_hip];
    const Point3 r = a.joints[layout.orientation.right_hip];
    CHECK(std::abs(r.y - l.y) < 1e-9);
    CHECK(r.x - l.x > 0.0);
    std::vector<Point3> before = f.joints;
    std::vector<Point3> after = a.joints;
    before.insert(before.end(), f.objects.begin(), f.objects.end());
    after.insert(after.end(), a.objects.begin(), a.objects.end());
    for (std::size_t i = 0; i < before.size(); ++i) {
      for (std::size_t j = i + 1; j < before.size(); ++j) {
        CHECK(std::abs(distance(before[i], before[j]) - distance(after[i], after[j])) < 1e-9);
      }
    }
  }
}

TEST_CASE("align_sequence reuses the previous rotation for degenerate frames") {
  RawSequence seq;
  seq.frames.push_back(frame_of({{0, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 1, 0}}));
  seq.frames.push_back(frame_of({{1, 1, 0}, {1, 1, 0}, {1, 1, 0}, {1, 2, 0}}));
  const RawSequence a = align_sequence(seq, three_joint_ref());
  // Frame 0 turns +y onto +x; frame 1 has coincident hips and inherits that.
  CHECK(a.frames[1].joints[0] == Point3{0, 0, 0});
  CHECK(a.frames[1].joints[3].x == doctest::Approx(1.0));
  CHECK(std::abs(a.frames[1].joints[3].y) < 1e-12);
}

TEST_CASE("align_sequence borrows the first good rotation at the start") {
  RawSequence seq;
  seq.frames.push_back(frame_of({{0, 0, 0}, {0, 0, 0}, {0, 0, 1}, {0, 1, 0}}));
  seq.frames.push_back(frame_of({{0, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, 0}}));
  const RawSequence a = align_sequence(seq, three_joint_ref());
  CHECK(a.frames[0].joints[3].x == doctest::Approx(1.0));
  CHECK(a.frames[1].joints[2].x == doctest::Approx(1.0));
}

TEST_CASE("to_trajectory_sample shapes") {
  std::mt19937_64 rng(1);
  RawSequence seq;
  seq.class_label = 2;
  seq.subject_id = 4;
  seq.sample_index = 3;
  seq.uid = 99;
  for (int t = 0; t < 40; ++t) seq.frames.push_back(random_frame(rng, 15, 0));

  SUBCASE("J=15, O=0") {
    const TrajectorySample s = to_trajectory_sample(seq, 0);
    CHECK(s.dimension() == 45);
    for (const auto& sig : s.sub_signals) CHECK(sig.size() == 40);
    CHECK(s.class_label == 2);
    CHECK(s.subject_id == 4);
    CHECK(s.sample_index == 3);
    CHECK(s.uid == 99);
    CHECK(s.sub_signals[sub_signal_index(3, 1)][5] == seq.frames[5].joints[3].y);
  }
  SUBCASE("J=15, O=5 with three real objects") {
    for (auto& f : seq.frames) f.objects = random_frame(rng, 3, 0).joints;
    const TrajectorySample s = to_trajectory_sample(seq, 5);
    REQUIRE(s.dimension() == 60);
    // 1-based sub-signals 46..54 carry object data, 55..60 are zero.
    for (std::size_t k = 45; k < 54; ++k) {
      CHECK(s.sub_signals[k][7] == seq.frames[7].objects[(k - 45) / 3].x * ((k - 45) % 3 == 0) +
                                       seq.frames[7].objects[(k - 45) / 3].y * ((k - 45) % 3 == 1) +
                                       seq.frames[7].objects[(k - 45) / 3].z * ((k - 45) % 3 == 2));
    }
    for (std::size_t k = 54; k < 60; ++k) {
      for (double v : s.sub_signals[k]) CHECK(v == 0.0);
    }
  }
  SUBCASE("too many objects") {
    for (auto& f : seq.frames) f.objects = random_frame(rng, 3, 0).joints;
    CHECK_ERROR_KIND(to_trajectory_sample(seq, 2), ErrorKind::ObjectOverflow);
  }
  SUBCASE("empty") {
    CHECK_ERROR_KIND(to_trajectory_sample(RawSequence{}, 0), ErrorKind::EmptySequence);
  }
}

TEST_CASE("K is (J + O) * 3 for every shape") {
  std::mt19937_64 rng(3);
  for (std::size_t j = 1; j <= 6; ++j) {
    for (std::size_t real = 0; real <= 3; ++real) {
      for (std::size_t o = real; o <= 4; ++o) {
        RawSequence seq;
        for (int t = 0; t < 3; ++t) seq.frames.push_back(random_frame(rng, j, real));
        CHECK(to_trajectory_sample(seq, o).dimension() == (j + o) * 3);
      }
    }
  }
}

TEST_CASE("mirror_sample") {
  std::mt19937_64 rng(5);
  const auto& layout = openni15_layout();
  RawSequence seq;
  for (int t = 0; t < 12; ++t) seq.frames.push_back(random_frame(rng, 15, 2));
  const TrajectorySample s = to_trajectory_sample(align_sequence(seq, layout.orientation), 2);

  SUBCASE("involution") {
    const TrajectorySample m2 = mirror_sample(mirror_sample(s, layout.symmetry), layout.symmetry);
    CHECK(m2.sub_signals == s.sub_signals);
  }
  SUBCASE("pairs swap, x negated, objects only negated") {
    const TrajectorySample m = mirror_sample(s, layout.symmetry);
    const auto perm = layout.symmetry.permutation(15);
    for (std::size_t j = 0; j < 15; ++j) {
      const std::size_t src = perm[j];
      for (std::size_t t = 0; t < 12; ++t) {
        CHECK(m.sub_signals[sub_signal_index(j, 0)][t] == -s.sub_signals[sub_signal_index(src, 0)][t]);
        CHECK(m.sub_signals[sub_signal_index(j, 1)][t] == s.sub_signals[sub_signal_index(src, 1)][t]);
        CHECK(m.sub_signals[sub_signal_index(j, 2)][t] == s.sub_signals[sub_signal_index(src, 2)][t]);
      }
    }
    for (std::size_t o = 15; o < 17; ++o) {
      for (std::size_t t = 0; t < 12; ++t) {
        CHECK(m.sub_signals[sub_signal_index(o, 0)][t] == -s.sub_signals[sub_signal_index(o, 0)][t]);
        CHECK(m.sub_signals[sub_signal_index(o, 1)][t] == s.sub_signals[sub_signal_index(o, 1)][t]);
      }
    }
  }
  SUBCASE("preserves inter-joint distances") {
    const TrajectorySample m = mirror_sample(s, layout.symmetry);
    auto point = [](const TrajectorySample& x, std::size_t j, std::size_t t) {
      return Point3{x.sub_signals[3 * j][t], x.sub_signals[3 * j + 1][t], x.sub_signals[3 * j + 2][t]};
    };
    const auto perm = layout.symmetry.permutation(15);
    for (std::size_t a = 0; a < 15; ++a) {
      for (std::size_t b = 0; b < 15; ++b) {
        CHECK(std::abs(distance(point(m, a, 4), point(m, b, 4)) -
                       distance(point(s, perm[a], 4), point(s, perm[b], 4))) < 1e-12);
      }
    }
  }
  SUBCASE("symmetric pose on the x=0 plane is a fixed point") {
    TrajectorySample sym = s;
    for (auto& sig : sym.sub_signals) std::fill(sig.begin(), sig.end(), 0.0);
    const auto perm = layout.symmetry.permutation(15);
    for (std::size_t j = 0; j < 15; ++j) {
      const std::size_t rep = std::min(j, perm[j]);
      for (std::size_t t = 0; t < 12; ++t) {
        sym.sub_signals[sub_signal_index(j, 1)][t] = 0.1 * static_cast<double>(rep + t);
        sym.sub_signals[sub_signal_index(j, 2)][t] = 0.2 * static_cast<double>(rep) - 0.01 * t;
      }
    }
    CHECK(mirror_sample(sym, layout.symmetry).sub_signals == sym.sub_signals);
  }
}

TEST_CASE("a right-handed arc mirrors into the same arc on the left hand") {
  const auto& layout = openni15_layout();
  const std::size_t lh = layout.find("LEFT_HAND");
  const std::size_t rh = layout.find("RIGHT_HAND");
  REQUIRE(lh != std::string::npos);
  TrajectorySample s;
  s.num_joints = 15;
  s.sub_signals.assign(45, Signal(20, 0.0));
  for (std::size_t t = 0; t < 20; ++t) {
    const double a = 0.15 * static_cast<double>(t);
    s.sub_signals[sub_signal_index(rh, 0)][t] = 0.3 + 0.2 * std::cos(a);
    s.sub_signals[sub_signal_index(rh, 1)][t] = 0.2 * std::sin(a);
    s.sub_signals[sub_signal_index(rh, 2)][t] = 0.4 + 0.1 * a;
    s.sub_signals[sub_signal_index(lh, 0)][t] = -0.3;
  }
  const TrajectorySample m = mirror_sample(s, layout.symmetry);
  for (std::size_t t = 0; t < 20; ++t) {
    CHECK(m.sub_signals[sub_signal_index(lh, 0)][t] == -s.sub_signals[sub_signal_index(rh, 0)][t]);
    CHECK(m.sub_signals[sub_signal_index(lh, 1)][t] == s.sub_signals[sub_signal_index(rh, 1)][t]);
    CHECK(m.sub_signals[sub_signal_index(lh, 2)][t] == s.sub_signals[sub_signal_index(rh, 2)][t]);
    CHECK(m.sub_signals[sub_signal_index(rh, 0)][t] == 0.3);
  }
}

TEST_CASE("canonical object order: numeric ids numerically, then names") {
  const std::vector<std::string> ids{"cup", "10", "2", "bowl", "1"};
  const auto order = canonical_object_order(ids);
  std::vector<std::string> sorted;
  for (auto i : order) sorted.push_back(ids[i]);
  CHECK(sorted == std::vector<std::string>{"1", "2", "10", "bowl", "cup"});
}

TEST_CASE("symmetry map permutation") {
  SymmetryMap m;
  m.joint_pairs = {{0, 2}};
  CHECK(m.permutation(4) == std::vector<std::size_t>{2, 1, 0, 3});
}

TEST_CASE("builtin layouts are consistent") {
  for (const char* name : {"openni15", "kinect20", "kinect25"}) {
    const SkeletonLayout& l = builtin_layout(name);
    CHECK(l.name == name);
    CHECK(l.orientation.left_hip < l.num_joints());
    CHECK(l.orientation.right_hip < l.num_joints());
    std::vector<int> seen(l.num_joints(), 0);
    for (auto [a, b] : l.symmetry.joint_pairs) {
      CHECK(a < l.num_joints());
      CHECK(b < l.num_joints());
      ++seen[a];
      ++seen[b];
    }
    for (int c : seen) CHECK(c <= 1);
    CHECK(SkeletonLayout::from_json(l.to_json()).joints == l.joints);
  }
  CHECK(openni15_layout().num_joints() == 15);
  CHECK(kinect20_layout().num_joints() == 20);
  CHECK(kinect25_layout().num_joints() == 25);
  CHECK_ERROR_KIND(builtin_layout("nope"), ErrorKind::InvalidArgument);
}
