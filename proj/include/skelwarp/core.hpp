#pragma once

// Domain types for skeleton/object action samples and the geometric
// normalization applied before any temporal processing.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace skelwarp {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

double distance(const Point3& a, const Point3& b) noexcept;

/// One captured frame. Positions are meters in a z-up camera frame.
struct Frame {
  std::vector<Point3> joints;
  std::vector<Point3> objects;
  int timestamp_index = 0;
};

/// A recorded action before it is turned into sub-signals.
struct RawSequence {
  std::vector<Frame> frames;
  int subject_id = 0;
  int class_label = 0;  // 1..C
  int sample_index = 0;
  /// Identifiers of the tracked objects, in the order they appear in each
  /// frame's `objects` (canonical order, see `canonical_object_order`).
  std::vector<std::string> object_ids;
  /// Optional dataset slice (e.g. recording environment).
  std::string group;
  /// Provenance tag, unique within a loaded dataset.
  std::uint64_t uid = 0;
};

using Signal = std::vector<double>;
using MultiSignal = std::vector<Signal>;

/// K = (J + O) * 3 sub-signals. Sub-signal 3*j + a holds axis a (x, y, z) of
/// joint j; objects follow the joints in canonical order, padded with
/// all-zero (hip-located) objects up to O.
struct TrajectorySample {
  MultiSignal sub_signals;
  std::size_t num_joints = 0;
  std::size_t num_objects = 0;
  int class_label = 0;
  int subject_id = 0;
  int sample_index = 0;
  std::uint64_t uid = 0;

  std::size_t dimension() const noexcept { return sub_signals.size(); }
};

inline constexpr std::size_t sub_signal_index(std::size_t point, int axis) {
  return point * 3 + static_cast<std::size_t>(axis);
}

/// Left/right joint pairs swapped by handedness mirroring. Joints not listed
/// map to themselves; mirroring reflects along x.
struct SymmetryMap {
  std::vector<std::pair<std::size_t, std::size_t>> joint_pairs;

  /// Image of every joint index under the map, for a skeleton of J joints.
  std::vector<std::size_t> permutation(std::size_t num_joints) const;
};

/// The anatomical reference used by `align_frame`: the hip point is either a
/// dedicated joint or the midpoint of the left and right hips, and the
/// left-hip -> right-hip direction (projected onto the ground plane) is
/// rotated onto +x.
struct OrientationConvention {
  std::optional<std::size_t> hip_center;
  std::size_t left_hip = 0;
  std::size_t right_hip = 0;
};

/// Translation followed by a rotation about z.
struct RigidTransform {
  Point3 translation;
  double cos_theta = 1.0;
  double sin_theta = 0.0;

  Point3 apply(const Point3& p) const noexcept;
};

inline constexpr double kOrientationTolerance = 1e-6;

Point3 hip_point(const Frame& frame, const OrientationConvention& reference);

/// Transform bringing `frame` into person-centric coordinates. Throws
/// DegenerateOrientation when the horizontal hip-to-hip vector is shorter
/// than kOrientationTolerance.
RigidTransform person_centric_transform(const Frame& frame,
                                        const OrientationConvention& reference);

Frame align_frame(const Frame& frame, const OrientationConvention& reference);

/// Aligns every frame. Frames with degenerate hips reuse the rotation of the
/// previous frame (or of the first non-degenerate frame at the start); the
/// translation is always the frame's own hip.
RawSequence align_sequence(const RawSequence& seq,
                           const OrientationConvention& reference);

/// Builds the K = (J + O) * 3 sub-signals of an aligned sequence.
TrajectorySample to_trajectory_sample(const RawSequence& seq,
                                      std::size_t max_objects);

/// Reflects an aligned sample across the body's bisector plane (x = 0).
TrajectorySample mirror_sample(const TrajectorySample& s,
                               const SymmetryMap& map);

/// Sorts object ids: numerically when both parse as integers, otherwise
/// lexicographically. Returns the permutation to apply to the ids.
std::vector<std::size_t> canonical_object_order(
    const std::vector<std::string>& ids);

}  // namespace skelwarp
