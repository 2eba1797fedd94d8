#include "skelwarp/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "skelwarp/error.hpp"

namespace skelwarp {
namespace {

using Json = nlohmann::json;

void flatten(const Json& j, const std::string& prefix, std::map<std::string, Json>& out) {
  for (const auto& [key, value] : j.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      flatten(value, path, out);
    } else {
      out[path] = value;
    }
  }
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "filter.median_window", "filter.savgol_window", "filter.savgol_order",
      "wavelet.family",       "wavelet.order",        "wavelet.levels",
      "wavelet.autotune",     "forest.n_trees",       "forest.features_per_split",
      "forest.max_depth",     "forest.min_samples_leaf", "objects.max",
      "mirroring",            "dtw.band",             "protocol.kind",
      "protocol.folds",       "protocol.train_fraction", "protocol.repeats",
      "seed"};
  return keys;
}

}  // namespace

ProtocolKind parse_protocol(std::string_view name) {
  if (name == "losubo") return ProtocolKind::LOSubO;
  if (name == "kfold") return ProtocolKind::CrossSubjectKFold;
  if (name == "loseqo") return ProtocolKind::LOSeqO;
  if (name == "holdout") return ProtocolKind::Holdout;
  throw Error(ErrorKind::ConfigError, "unknown protocol '" + std::string(name) +
                                          "' (expected losubo, kfold, loseqo or holdout)");
}

std::string_view to_string(ProtocolKind kind) noexcept {
  switch (kind) {
    case ProtocolKind::LOSubO: return "losubo";
    case ProtocolKind::CrossSubjectKFold: return "kfold";
    case ProtocolKind::LOSeqO: return "loseqo";
    case ProtocolKind::Holdout: return "holdout";
  }
  return "?";
}

PipelineConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::ConfigError, "config must be a JSON object");
  std::map<std::string, Json> flat;
  flatten(j, "", flat);

  std::vector<std::string> problems;
  for (const auto& [key, value] : flat) {
    if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end()) {
      problems.push_back("unknown key '" + key + "'");
    }
  }

  PipelineConfig c;
  std::optional<int> order;
  auto get = [&](const std::string& key, auto&& apply) {
    const auto it = flat.find(key);
    if (it == flat.end()) return;
    try {
      apply(it->second);
    } catch (const std::exception& e) {
      problems.push_back("bad value for '" + key + "': " + e.what());
    }
  };
  auto positive = [](int v) {
    if (v < 1) throw std::invalid_argument("must be >= 1");
    return v;
  };

  get("filter.median_window", [&](const Json& v) { c.filter.median_window = v.get<int>(); });
  get("filter.savgol_window", [&](const Json& v) { c.filter.savgol_window = v.get<int>(); });
  get("filter.savgol_order", [&](const Json& v) { c.filter.savgol_order = v.get<int>(); });
  get("wavelet.family", [&](const Json& v) {
    c.wavelet.family = parse_family(v.get<std::string>());
    c.wavelet.order = default_order(c.wavelet.family);
  });
  get("wavelet.order", [&](const Json& v) { order = positive(v.get<int>()); });
  get("wavelet.levels", [&](const Json& v) { c.wavelet.levels = positive(v.get<int>()); });
  get("wavelet.autotune", [&](const Json& v) { c.autotune = v.get<bool>(); });
  get("forest.n_trees", [&](const Json& v) { c.forest.n_trees = positive(v.get<int>()); });
  get("forest.features_per_split", [&](const Json& v) {
    if (v.is_string()) {
      if (v.get<std::string>() != "sqrt") throw std::invalid_argument("expected \"sqrt\" or an integer");
      c.forest.features_per_split = 0;
    } else {
      c.forest.features_per_split = positive(v.get<int>());
    }
  });
  get("forest.max_depth", [&](const Json& v) {
    c.forest.max_depth = v.is_null() ? 0 : positive(v.get<int>());
  });
  get("forest.min_samples_leaf",
      [&](const Json& v) { c.forest.min_samples_leaf = positive(v.get<int>()); });
  get("objects.max", [&](const Json& v) {
    if (v.is_string() && v.get<std::string>() == "auto") {
      c.max_objects.reset();
    } else {
      const int n = v.get<int>();
      if (n < 0) throw std::invalid_argument("must be >= 0");
      c.max_objects = static_cast<std::size_t>(n);
    }
  });
  get("mirroring", [&](const Json& v) {
    if (v.is_string() && v.get<std::string>() == "auto") {
      c.mirroring.reset();
    } else {
      c.mirroring = v.get<bool>();
    }
  });
  get("dtw.band", [&](const Json& v) {
    if (v.is_null()) {
      c.dtw_band.reset();
    } else {
      const int n = v.get<int>();
      if (n < 0) throw std::invalid_argument("must be >= 0");
      c.dtw_band = static_cast<std::size_t>(n);
    }
  });
  get("protocol.kind", [&](const Json& v) { c.protocol.kind = parse_protocol(v.get<std::string>()); });
  get("protocol.folds", [&](const Json& v) {
    const int k = v.get<int>();
    if (k < 2) throw std::invalid_argument("must be >= 2");
    c.protocol.folds = k;
  });
  get("protocol.train_fraction", [&](const Json& v) {
    const double f = v.get<double>();
    if (!(f > 0.0 && f < 1.0)) throw std::invalid_argument("must be in (0, 1)");
    c.protocol.train_fraction = f;
  });
  get("protocol.repeats", [&](const Json& v) { c.protocol.repeats = positive(v.get<int>()); });
  get("seed", [&](const Json& v) { c.seed = v.get<std::uint64_t>(); });

  if (order) c.wavelet.order = *order;
  if (problems.empty()) {
    try {
      validate(c.filter);
      scaling_filter(c.wavelet.family, c.wavelet.order);
    } catch (const Error& e) {
      problems.push_back(e.what());
    }
  }
  if (!problems.empty()) {
    std::ostringstream msg;
    msg << "invalid config:";
    for (const auto& p : problems) msg << "\n  " << p;
    throw Error(ErrorKind::ConfigError, msg.str());
  }
  c.forest.seed = c.seed;
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return config_from_json(Json::object());
  try {
    return config_from_json(Json::parse(text));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::ConfigError, path.string() + ": " + e.what());
  }
}

Json to_json(const PipelineConfig& c) {
  Json j;
  j["filter"] = {{"median_window", c.filter.median_window},
                 {"savgol_window", c.filter.savgol_window},
                 {"savgol_order", c.filter.savgol_order}};
  j["wavelet"] = {{"family", std::string(short_name(c.wavelet.family))},
                  {"order", c.wavelet.order},
                  {"levels", c.wavelet.levels},
                  {"autotune", c.autotune}};
  j["forest"] = {{"n_trees", c.forest.n_trees},
                 {"features_per_split", c.forest.features_per_split == 0
                                            ? Json("sqrt")
                                            : Json(c.forest.features_per_split)},
                 {"max_depth", c.forest.max_depth == 0 ? Json(nullptr) : Json(c.forest.max_depth)},
                 {"min_samples_leaf", c.forest.min_samples_leaf}};
  j["objects"] = {{"max", c.max_objects ? Json(*c.max_objects) : Json("auto")}};
  j["mirroring"] = c.mirroring ? Json(*c.mirroring) : Json("auto");
  j["dtw"] = {{"band", c.dtw_band ? Json(*c.dtw_band) : Json(nullptr)}};
  j["protocol"] = {{"kind", std::string(to_string(c.protocol.kind))},
                   {"folds", c.protocol.folds},
                   {"train_fraction", c.protocol.train_fraction},
                   {"repeats", c.protocol.repeats}};
  j["seed"] = c.seed;
  return j;
}

}  // namespace skelwarp
