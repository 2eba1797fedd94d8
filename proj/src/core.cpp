#include "skelwarp/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "skelwarp/error.hpp"

namespace skelwarp {

double distance(const Point3& a, const Point3& b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

std::vector<std::size_t> SymmetryMap::permutation(std::size_t num_joints) const {
  std::vector<std::size_t> perm(num_joints);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (const auto& [left, right] : joint_pairs) {
    if (left >= num_joints || right >= num_joints) {
      throw Error(ErrorKind::InvalidArgument,
                  "symmetry pair refers to a joint outside the skeleton");
    }
    perm[left] = right;
    perm[right] = left;
  }
  return perm;
}

Point3 RigidTransform::apply(const Point3& p) const noexcept {
  const double x = p.x - translation.x;
  const double y = p.y - translation.y;
  const double z = p.z - translation.z;
  return {cos_theta * x - sin_theta * y, sin_theta * x + cos_theta * y, z};
}

Point3 hip_point(const Frame& frame, const OrientationConvention& reference) {
  const auto need = std::max({reference.left_hip, reference.right_hip,
                              reference.hip_center.value_or(0)});
  if (need >= frame.joints.size()) {
    throw Error(ErrorKind::InvalidArgument,
                "frame has no joint " + std::to_string(need) +
                    " required by the orientation convention");
  }
  if (reference.hip_center) return frame.joints[*reference.hip_center];
  const Point3& l = frame.joints[reference.left_hip];
  const Point3& r = frame.joints[reference.right_hip];
  return {0.5 * (l.x + r.x), 0.5 * (l.y + r.y), 0.5 * (l.z + r.z)};
}

RigidTransform person_centric_transform(const Frame& frame,
                                        const OrientationConvention& reference) {
  RigidTransform t;
  t.translation = hip_point(frame, reference);
  const Point3& l = frame.joints[reference.left_hip];
  const Point3& r = frame.joints[reference.right_hip];
  const double vx = r.x - l.x;
  const double vy = r.y - l.y;
  const double norm = std::hypot(vx, vy);
  if (!(norm >= kOrientationTolerance)) {
    throw Error(ErrorKind::DegenerateOrientation,
                "left and right hips coincide in the horizontal plane");
  }
  // Rotate by -atan2(vy, vx) so the hip axis lands on +x.
  t.cos_theta = vx / norm;
  t.sin_theta = -vy / norm;
  return t;
}

namespace {

Frame apply_transform(const Frame& frame, const RigidTransform& t) {
  Frame out;
  out.timestamp_index = frame.timestamp_index;
  out.joints.reserve(frame.joints.size());
  out.objects.reserve(frame.objects.size());
  for (const auto& p : frame.joints) out.joints.push_back(t.apply(p));
  for (const auto& p : frame.objects) out.objects.push_back(t.apply(p));
  return out;
}

}  // namespace

Frame align_frame(const Frame& frame, const OrientationConvention& reference) {
  return apply_transform(frame, person_centric_transform(frame, reference));
}

RawSequence align_sequence(const RawSequence& seq,
                           const OrientationConvention& reference) {
  std::vector<std::optional<RigidTransform>> transforms;
  transforms.reserve(seq.frames.size());
  for (const auto& f : seq.frames) {
    try {
      transforms.emplace_back(person_centric_transform(f, reference));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateOrientation) throw;
      transforms.emplace_back(std::nullopt);
    }
  }

  std::optional<RigidTransform> previous;
  for (const auto& t : transforms) {
    if (t) {
      previous = t;
      break;
    }
  }

  RawSequence out = seq;
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    RigidTransform t;
    if (transforms[i]) {
      t = *transforms[i];
      previous = t;
    } else {
      if (previous) t = *previous;
      t.translation = hip_point(seq.frames[i], reference);
    }
    out.frames[i] = apply_transform(seq.frames[i], t);
  }
  return out;
}

TrajectorySample to_trajectory_sample(const RawSequence& seq,
                                      std::size_t max_objects) {
  if (seq.frames.empty()) {
    throw Error(ErrorKind::EmptySequence, "sequence has no frames");
  }
  const std::size_t joints = seq.frames.front().joints.size();
  const std::size_t objects = seq.frames.front().objects.size();
  for (const auto& f : seq.frames) {
    if (f.joints.size() != joints || f.objects.size() != objects) {
      throw Error(ErrorKind::InvalidArgument,
                  "frames disagree on joint or object count");
    }
  }
  if (objects > max_objects) {
    throw Error(ErrorKind::ObjectOverflow,
                "sample tracks " + std::to_string(objects) +
                    " objects but at most " + std::to_string(max_objects) +
                    " are allowed");
  }

  TrajectorySample s;
  s.num_joints = joints;
  s.num_objects = max_objects;
  s.class_label = seq.class_label;
  s.subject_id = seq.subject_id;
  s.sample_index = seq.sample_index;
  s.uid = seq.uid;

  const std::size_t frames = seq.frames.size();
  s.sub_signals.assign((joints + max_objects) * 3, Signal(frames, 0.0));
  for (std::size_t t = 0; t < frames; ++t) {
    const Frame& f = seq.frames[t];
    for (std::size_t p = 0; p < joints + objects; ++p) {
      const Point3& q = p < joints ? f.joints[p] : f.objects[p - joints];
      s.sub_signals[sub_signal_index(p, 0)][t] = q.x;
      s.sub_signals[sub_signal_index(p, 1)][t] = q.y;
      s.sub_signals[sub_signal_index(p, 2)][t] = q.z;
    }
  }
  return s;
}

TrajectorySample mirror_sample(const TrajectorySample& s,
                               const SymmetryMap& map) {
  if (s.dimension() != (s.num_joints + s.num_objects) * 3) {
    throw Error(ErrorKind::DimensionMismatch,
                "sample dimension does not match its joint/object counts");
  }
  const auto perm = map.permutation(s.num_joints);
  TrajectorySample out = s;
  for (std::size_t p = 0; p < s.num_joints + s.num_objects; ++p) {
    const std::size_t src = p < s.num_joints ? perm[p] : p;
    for (int axis = 0; axis < 3; ++axis) {
      Signal v = s.sub_signals[sub_signal_index(src, axis)];
      if (axis == 0) {
        for (double& x : v) x = -x;
      }
      out.sub_signals[sub_signal_index(p, axis)] = std::move(v);
    }
  }
  return out;
}

std::vector<std::size_t> canonical_object_order(
    const std::vector<std::string>& ids) {
  auto as_int = [](const std::string& s) -> std::optional<long long> {
    long long v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
    return v;
  };
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Stable: equal ids keep their first-appearance order.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ia = as_int(ids[a]);
    const auto ib = as_int(ids[b]);
    if (ia && ib) return *ia < *ib;
    if (ia != ib) return ia.has_value();  // numeric ids first
    return ids[a] < ids[b];
  });
  return order;
}

}  // namespace skelwarp
