#pragma once

#include <json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "skelwarp/core.hpp"

namespace skelwarp {

/// Joint naming, alignment reference and mirror pairs of one skeleton model.
struct SkeletonLayout {
  std::string name;
  std::vector<std::string> joints;
  OrientationConvention orientation;
  SymmetryMap symmetry;

  std::size_t num_joints() const noexcept { return joints.size(); }
  /// Index of a joint name, or npos.
  std::size_t find(std::string_view joint) const noexcept;

  nlohmann::json to_json() const;
  static SkeletonLayout from_json(const nlohmann::json& j);
};

/// OpenNI 15-joint order used by CAD-60, CAD-120 and UCF-Kinect. No hip
/// centre joint: the hip point is the midpoint of the two hips.
const SkeletonLayout& openni15_layout();
/// Kinect SDK v1 20-joint order (UT-Kinect).
const SkeletonLayout& kinect20_layout();
/// Kinect v2 25-joint order (TST fall detection).
const SkeletonLayout& kinect25_layout();

/// Looks up "openni15", "kinect20", "kinect25" or a format tag that implies
/// one of them.
const SkeletonLayout& builtin_layout(std::string_view name);

}  // namespace skelwarp
