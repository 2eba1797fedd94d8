#pragma once

// Dataset ingestion. Every loader emits sequences in meters with z up and
// joints in the layout's canonical order; see docs/formats.md.

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "skelwarp/core.hpp"
#include "skelwarp/skeleton.hpp"

namespace skelwarp {

enum class DatasetFormat { Cad60, Cad120, UtKinect, UcfKinect, Tst, GenericCsv };

DatasetFormat parse_format(std::string_view tag);
std::string_view to_string(DatasetFormat format) noexcept;

enum class UpAxis { Y, Z };

/// Joint layout, up axis and unit scale assumed for a format unless a
/// manifest overrides them.
struct FormatDefaults {
  std::string_view layout;
  UpAxis up;
  double scale;
};

FormatDefaults format_defaults(DatasetFormat format);

struct ManifestEntry {
  std::filesystem::path file;
  std::string label;
  int subject = 0;
  int sample_index = 0;
  std::string group;
  /// Inclusive first/last frame ids to cut from a continuous recording.
  std::optional<std::array<int, 2>> segment;
  std::optional<std::filesystem::path> objects;
};

struct DatasetManifest {
  DatasetFormat format = DatasetFormat::GenericCsv;
  std::filesystem::path root;
  SkeletonLayout layout;
  UpAxis up_axis = UpAxis::Z;
  double unit_scale = 1.0;  // multiply raw values to get meters
  std::vector<std::string> class_names;  // empty: derive from labels
  std::vector<ManifestEntry> entries;
};

/// Parses a JSON manifest. Relative paths resolve against the manifest's
/// directory (then `root`). Format defaults for layout, units and up-axis can
/// be overridden with "layout", "units" and "up_axis".
DatasetManifest load_manifest(const std::filesystem::path& path);

struct Dataset {
  DatasetFormat format = DatasetFormat::GenericCsv;
  SkeletonLayout layout;
  std::vector<std::string> class_names;  // class_names[c - 1] names label c
  std::vector<RawSequence> sequences;
};

/// Loads every manifest entry. Labels are mapped to 1..C (through
/// `class_names` when given, else integers must already be 1..C, else
/// sorted distinct strings). Throws ParseError, MissingFile, LabelMapError.
Dataset load_dataset(const DatasetManifest& manifest);

/// Converts a point from the dataset's camera convention to meters, z-up.
Point3 to_canonical(const Point3& raw, UpAxis up, double unit_scale);

/// generic-csv: header `frame,<id>_x,<id>_y,<id>_z,...`; ids naming a layout
/// joint are joints (all must be present), the rest are objects.
RawSequence read_generic_csv(const std::filesystem::path& path, const SkeletonLayout& layout,
                             UpAxis up = UpAxis::Z, double unit_scale = 1.0);

/// Writes meters, z-up, shortest round-trip decimal representation.
void write_generic_csv(const std::filesystem::path& path, const RawSequence& seq,
                       const SkeletonLayout& layout);

struct ObjectTrajectories {
  std::vector<std::string> ids;  // canonical order
  std::vector<int> frame_ids;
  std::vector<std::vector<Point3>> positions;  // [frame][object]
};

/// Object trajectory file: same header convention as generic-csv, only
/// object columns. Values are meters in camera coordinates.
ObjectTrajectories read_object_file(const std::filesystem::path& path, UpAxis up);

/// Parses one skeleton file of a dataset-specific format into frames.
std::vector<Frame> read_skeleton_file(const std::filesystem::path& path,
                                      DatasetFormat format, const SkeletonLayout& layout,
                                      UpAxis up, double unit_scale);

/// Writes a manifest for generic-csv files (used by `synth`).
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

}  // namespace skelwarp
