#pragma once

// Model bundle: a directory of JSON files indexed by manifest.json, which
// records the format version and a CRC-32 for every file. See docs/bundle.md.

#include <filesystem>

#include "skelwarp/pipeline.hpp"

namespace skelwarp {

inline constexpr int kBundleFormatVersion = 1;

void save_model(const TrainedModel& model, const std::filesystem::path& dir);

/// Throws VersionMismatch for another format version and CorruptBundle for
/// missing, unreadable or checksum-failing files.
TrainedModel load_model(const std::filesystem::path& dir);

}  // namespace skelwarp
