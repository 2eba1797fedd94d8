#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>

#include "skelwarp/filtering.hpp"
#include "skelwarp/forest.hpp"
#include "skelwarp/wavelet.hpp"

namespace skelwarp {

enum class ProtocolKind { LOSubO, CrossSubjectKFold, LOSeqO, Holdout };

ProtocolKind parse_protocol(std::string_view name);
std::string_view to_string(ProtocolKind kind) noexcept;

struct ProtocolConfig {
  ProtocolKind kind = ProtocolKind::LOSubO;
  int folds = 2;                 // CrossSubjectKFold
  double train_fraction = 0.7;   // Holdout
  int repeats = 10;
};

/// Every key has a default; see docs/config.md for the key list.
struct PipelineConfig {
  FilterParams filter;
  WaveletSpec wavelet;
  bool autotune = true;
  ForestParams forest;
  /// Objects per sample after padding; unset infers the training maximum.
  std::optional<std::size_t> max_objects;
  /// Unset: on for CAD-60 style data, off elsewhere.
  std::optional<bool> mirroring;
  std::optional<std::size_t> dtw_band;
  ProtocolConfig protocol;
  std::uint64_t seed = 1;
};

/// Reads a JSON config (nested objects or dotted keys). An empty file yields
/// the defaults. Throws ConfigError naming every unknown or malformed key.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PipelineConfig& config);

}  // namespace skelwarp
