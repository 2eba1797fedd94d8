#include "skelwarp/skeleton.hpp"

#include "skelwarp/error.hpp"

namespace skelwarp {

std::size_t SkeletonLayout::find(std::string_view joint) const noexcept {
  for (std::size_t i = 0; i < joints.size(); ++i) {
    if (joints[i] == joint) return i;
  }
  return std::string::npos;
}

nlohmann::json SkeletonLayout::to_json() const {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [l, r] : symmetry.joint_pairs) pairs.push_back({l, r});
  nlohmann::json j;
  j["name"] = name;
  j["joints"] = joints;
  j["hip_center"] = orientation.hip_center ? nlohmann::json(*orientation.hip_center)
                                           : nlohmann::json(nullptr);
  j["left_hip"] = orientation.left_hip;
  j["right_hip"] = orientation.right_hip;
  j["symmetry"] = std::move(pairs);
  return j;
}

SkeletonLayout SkeletonLayout::from_json(const nlohmann::json& j) {
  SkeletonLayout l;
  l.name = j.value("name", std::string("custom"));
  l.joints = j.at("joints").get<std::vector<std::string>>();
  auto index = [&](const nlohmann::json& v) -> std::size_t {
    const std::size_t i = v.is_string() ? l.find(v.get<std::string>()) : v.get<std::size_t>();
    if (i >= l.joints.size()) {
      throw Error(ErrorKind::InvalidArgument, "layout refers to unknown joint " + v.dump());
    }
    return i;
  };
  if (j.contains("hip_center") && !j.at("hip_center").is_null()) {
    l.orientation.hip_center = index(j.at("hip_center"));
  }
  l.orientation.left_hip = index(j.at("left_hip"));
  l.orientation.right_hip = index(j.at("right_hip"));
  if (j.contains("symmetry")) {
    for (const auto& p : j.at("symmetry")) {
      l.symmetry.joint_pairs.emplace_back(index(p.at(0)), index(p.at(1)));
    }
  }
  std::vector<bool> used(l.joints.size(), false);
  for (const auto& [a, b] : l.symmetry.joint_pairs) {
    if (a == b || used[a] || used[b]) {
      throw Error(ErrorKind::InvalidArgument, "symmetry pairs must be disjoint");
    }
    used[a] = used[b] = true;
  }
  return l;
}

const SkeletonLayout& openni15_layout() {
  static const SkeletonLayout layout{
      "openni15",
      {"HEAD", "NECK", "TORSO", "LEFT_SHOULDER", "LEFT_ELBOW", "RIGHT_SHOULDER",
       "RIGHT_ELBOW", "LEFT_HIP", "LEFT_KNEE", "RIGHT_HIP", "RIGHT_KNEE", "LEFT_HAND",
       "RIGHT_HAND", "LEFT_FOOT", "RIGHT_FOOT"},
      {std::nullopt, 7, 9},
      {{{3, 5}, {4, 6}, {7, 9}, {8, 10}, {11, 12}, {13, 14}}}};
  return layout;
}

const SkeletonLayout& kinect20_layout() {
  static const SkeletonLayout layout{
      "kinect20",
      {"HIP_CENTER", "SPINE", "SHOULDER_CENTER", "HEAD", "SHOULDER_LEFT", "ELBOW_LEFT",
       "WRIST_LEFT", "HAND_LEFT", "SHOULDER_RIGHT", "ELBOW_RIGHT", "WRIST_RIGHT",
       "HAND_RIGHT", "HIP_LEFT", "KNEE_LEFT", "ANKLE_LEFT", "FOOT_LEFT", "HIP_RIGHT",
       "KNEE_RIGHT", "ANKLE_RIGHT", "FOOT_RIGHT"},
      {0, 12, 16},
      {{{4, 8}, {5, 9}, {6, 10}, {7, 11}, {12, 16}, {13, 17}, {14, 18}, {15, 19}}}};
  return layout;
}

const SkeletonLayout& kinect25_layout() {
  static const SkeletonLayout layout{
      "kinect25",
      {"SPINE_BASE", "SPINE_MID", "NECK", "HEAD", "SHOULDER_LEFT", "ELBOW_LEFT",
       "WRIST_LEFT", "HAND_LEFT", "SHOULDER_RIGHT", "ELBOW_RIGHT", "WRIST_RIGHT",
       "HAND_RIGHT", "HIP_LEFT", "KNEE_LEFT", "ANKLE_LEFT", "FOOT_LEFT", "HIP_RIGHT",
       "KNEE_RIGHT", "ANKLE_RIGHT", "FOOT_RIGHT", "SPINE_SHOULDER", "HAND_TIP_LEFT",
       "THUMB_LEFT", "HAND_TIP_RIGHT", "THUMB_RIGHT"},
      {0, 12, 16},
      {{{4, 8},
        {5, 9},
        {6, 10},
        {7, 11},
        {12, 16},
        {13, 17},
        {14, 18},
        {15, 19},
        {21, 23},
        {22, 24}}}};
  return layout;
}

const SkeletonLayout& builtin_layout(std::string_view name) {
  if (name == "openni15" || name == "cad60" || name == "cad120" || name == "ucfkinect") {
    return openni15_layout();
  }
  if (name == "kinect20" || name == "utkinect") return kinect20_layout();
  if (name == "kinect25" || name == "tst") return kinect25_layout();
  throw Error(ErrorKind::InvalidArgument, "unknown skeleton layout '" + std::string(name) + "'");
}

}  // namespace skelwarp
