#include "skelwarp/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <json.hpp>
#include <set>
#include <sstream>

#include "skelwarp/error.hpp"

namespace skelwarp {
namespace fs = std::filesystem;

namespace {

[[noreturn]] void parse_error(const fs::path& file, std::size_t line, const std::string& what) {
  throw Error(ErrorKind::ParseError, file.string() + ":" + std::to_string(line) + ": " + what);
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingFile, "cannot open " + path.string());
  return in;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// Splits on commas and whitespace, dropping empty fields.
std::vector<std::string> tokens(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',' || c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::optional<double> to_double(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::vector<double> numbers(const std::vector<std::string>& toks, const fs::path& file,
                            std::size_t line) {
  std::vector<double> out;
  out.reserve(toks.size());
  for (const auto& t : toks) {
    const auto v = to_double(t);
    if (!v) parse_error(file, line, "not a finite number: '" + t + "'");
    out.push_back(*v);
  }
  return out;
}

int as_frame_id(double v, const fs::path& file, std::size_t line) {
  if (v != std::floor(v)) parse_error(file, line, "frame id is not an integer");
  return static_cast<int>(v);
}

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

struct ColumnTable {
  // id -> column index of x, y, z
  std::map<std::string, std::array<int, 3>> columns;
  std::vector<std::string> order;  // first-appearance order of ids
  std::vector<int> frame_ids;
  std::vector<std::vector<double>> rows;
};

ColumnTable read_columns(const fs::path& path) {
  auto in = open_input(path);
  ColumnTable table;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (width == 0) {
      if (fields.empty() || fields.front() != "frame") {
        parse_error(path, line_no, "header must start with 'frame'");
      }
      width = fields.size();
      for (std::size_t c = 1; c < fields.size(); ++c) {
        const auto& name = fields[c];
        const auto us = name.rfind('_');
        if (us == std::string::npos || us + 2 != name.size()) {
          parse_error(path, line_no, "column '" + name + "' is not <id>_{x|y|z}");
        }
        const char axis = name.back();
        const int a = axis == 'x' ? 0 : axis == 'y' ? 1 : axis == 'z' ? 2 : -1;
        if (a < 0) parse_error(path, line_no, "column '" + name + "' has no x/y/z suffix");
        const std::string id = name.substr(0, us);
        auto [it, inserted] = table.columns.try_emplace(id, std::array<int, 3>{-1, -1, -1});
        if (inserted) table.order.push_back(id);
        if (it->second[a] >= 0) parse_error(path, line_no, "duplicate column '" + name + "'");
        it->second[a] = static_cast<int>(c);
      }
      for (const auto& [id, cols] : table.columns) {
        if (std::find(cols.begin(), cols.end(), -1) != cols.end()) {
          parse_error(path, line_no, "id '" + id + "' lacks one of _x/_y/_z");
        }
      }
      continue;
    }
    if (fields.size() != width) {
      parse_error(path, line_no,
                  "expected " + std::to_string(width) + " fields, got " +
                      std::to_string(fields.size()));
    }
    const auto values = numbers(fields, path, line_no);
    table.frame_ids.push_back(as_frame_id(values.front(), path, line_no));
    table.rows.push_back(values);
  }
  if (width == 0) parse_error(path, line_no, "missing header");
  return table;
}

Point3 column_point(const ColumnTable& t, std::size_t row, const std::string& id) {
  const auto& c = t.columns.at(id);
  const auto& r = t.rows[row];
  return {r[static_cast<std::size_t>(c[0])], r[static_cast<std::size_t>(c[1])],
          r[static_cast<std::size_t>(c[2])]};
}

std::vector<std::string> canonical_ids(std::vector<std::string> ids) {
  const auto order = canonical_object_order(ids);
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (std::size_t i : order) out.push_back(ids[i]);
  return out;
}

// CAD-60/120 frame record: id, 11 x (9 orientation, conf, x, y, z, conf),
// 4 x (x, y, z, conf). Positions are millimetres.
Frame parse_cad_frame(const std::vector<double>& v, const fs::path& file, std::size_t line,
                      UpAxis up, double scale) {
  constexpr std::size_t kOriented = 11;
  constexpr std::size_t kPlain = 4;
  constexpr std::size_t kExpected = 1 + kOriented * 14 + kPlain * 4;
  if (v.size() != kExpected) {
    parse_error(file, line,
                "CAD record has " + std::to_string(v.size()) + " values, expected " +
                    std::to_string(kExpected));
  }
  Frame f;
  f.timestamp_index = as_frame_id(v[0], file, line);
  std::size_t pos = 1;
  for (std::size_t j = 0; j < kOriented; ++j) {
    pos += 10;  // orientation matrix and its confidence
    f.joints.push_back(to_canonical({v[pos], v[pos + 1], v[pos + 2]}, up, scale));
    pos += 4;
  }
  for (std::size_t j = 0; j < kPlain; ++j) {
    f.joints.push_back(to_canonical({v[pos], v[pos + 1], v[pos + 2]}, up, scale));
    pos += 4;
  }
  return f;
}

// Rows of `frame x1 y1 z1 ... xJ yJ zJ`; `frame` is optional when
// `frame_optional` and the row has exactly 3J values.
Frame parse_plain_frame(const std::vector<double>& v, std::size_t joints, bool frame_optional,
                        int fallback_id, const fs::path& file, std::size_t line, UpAxis up,
                        double scale) {
  const std::size_t with_id = 3 * joints + 1;
  std::size_t pos = 0;
  Frame f;
  if (v.size() == with_id) {
    f.timestamp_index = as_frame_id(v[0], file, line);
    pos = 1;
  } else if (frame_optional && v.size() == 3 * joints) {
    f.timestamp_index = fallback_id;
  } else {
    parse_error(file, line,
                "expected " + std::to_string(with_id) + " values, got " +
                    std::to_string(v.size()));
  }
  for (std::size_t j = 0; j < joints; ++j, pos += 3) {
    f.joints.push_back(to_canonical({v[pos], v[pos + 1], v[pos + 2]}, up, scale));
  }
  return f;
}

}  // namespace

FormatDefaults format_defaults(DatasetFormat format) {
  switch (format) {
    case DatasetFormat::Cad60:
    case DatasetFormat::Cad120: return {"openni15", UpAxis::Y, 1e-3};
    case DatasetFormat::UcfKinect: return {"openni15", UpAxis::Y, 1e-3};
    case DatasetFormat::UtKinect: return {"kinect20", UpAxis::Y, 1.0};
    case DatasetFormat::Tst: return {"kinect25", UpAxis::Y, 1.0};
    case DatasetFormat::GenericCsv: return {"openni15", UpAxis::Z, 1.0};
  }
  return {"openni15", UpAxis::Z, 1.0};
}

DatasetFormat parse_format(std::string_view tag) {
  if (tag == "cad60") return DatasetFormat::Cad60;
  if (tag == "cad120") return DatasetFormat::Cad120;
  if (tag == "utkinect") return DatasetFormat::UtKinect;
  if (tag == "ucfkinect") return DatasetFormat::UcfKinect;
  if (tag == "tst") return DatasetFormat::Tst;
  if (tag == "generic-csv") return DatasetFormat::GenericCsv;
  throw Error(ErrorKind::ParseError, "unknown dataset format '" + std::string(tag) + "'");
}

std::string_view to_string(DatasetFormat format) noexcept {
  switch (format) {
    case DatasetFormat::Cad60: return "cad60";
    case DatasetFormat::Cad120: return "cad120";
    case DatasetFormat::UtKinect: return "utkinect";
    case DatasetFormat::UcfKinect: return "ucfkinect";
    case DatasetFormat::Tst: return "tst";
    case DatasetFormat::GenericCsv: return "generic-csv";
  }
  return "?";
}

Point3 to_canonical(const Point3& raw, UpAxis up, double unit_scale) {
  const Point3 p{raw.x * unit_scale, raw.y * unit_scale, raw.z * unit_scale};
  if (up == UpAxis::Z) return p;
  // +90 degree rotation about x: y (up) -> z, z (depth) -> -y.
  return {p.x, -p.z, p.y};
}

RawSequence read_generic_csv(const fs::path& path, const SkeletonLayout& layout, UpAxis up,
                             double unit_scale) {
  const ColumnTable table = read_columns(path);
  for (const auto& joint : layout.joints) {
    if (!table.columns.contains(joint)) {
      throw Error(ErrorKind::ParseError,
                  path.string() + ": missing columns for joint '" + joint + "'");
    }
  }
  std::vector<std::string> object_ids;
  for (const auto& id : table.order) {
    if (layout.find(id) == std::string::npos) object_ids.push_back(id);
  }
  object_ids = canonical_ids(std::move(object_ids));

  RawSequence seq;
  seq.object_ids = object_ids;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    Frame f;
    f.timestamp_index = table.frame_ids[r];
    for (const auto& joint : layout.joints) {
      f.joints.push_back(to_canonical(column_point(table, r, joint), up, unit_scale));
    }
    for (const auto& id : object_ids) {
      f.objects.push_back(to_canonical(column_point(table, r, id), up, unit_scale));
    }
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

void write_generic_csv(const fs::path& path, const RawSequence& seq,
                       const SkeletonLayout& layout) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::MissingFile, "cannot write " + path.string());
  const std::size_t objects = seq.frames.empty() ? 0 : seq.frames.front().objects.size();
  std::vector<std::string> ids = seq.object_ids;
  for (std::size_t o = ids.size(); o < objects; ++o) ids.push_back("object" + std::to_string(o + 1));

  out << "frame";
  auto header = [&](const std::string& id) { out << ',' << id << "_x," << id << "_y," << id << "_z"; };
  for (const auto& j : layout.joints) header(j);
  for (std::size_t o = 0; o < objects; ++o) header(ids[o]);
  out << '\n';
  for (const auto& f : seq.frames) {
    if (f.joints.size() != layout.num_joints()) {
      throw Error(ErrorKind::DimensionMismatch, "frame joint count differs from layout");
    }
    out << f.timestamp_index;
    auto point = [&](const Point3& p) {
      out << ',' << shortest(p.x) << ',' << shortest(p.y) << ',' << shortest(p.z);
    };
    for (const auto& p : f.joints) point(p);
    for (const auto& p : f.objects) point(p);
    out << '\n';
  }
}

ObjectTrajectories read_object_file(const fs::path& path, UpAxis up) {
  const ColumnTable table = read_columns(path);
  ObjectTrajectories t;
  t.ids = canonical_ids(table.order);
  t.frame_ids = table.frame_ids;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::vector<Point3> row;
    for (const auto& id : t.ids) row.push_back(to_canonical(column_point(table, r, id), up, 1.0));
    t.positions.push_back(std::move(row));
  }
  return t;
}

std::vector<Frame> read_skeleton_file(const fs::path& path, DatasetFormat format,
                                      const SkeletonLayout& layout, UpAxis up,
                                      double unit_scale) {
  if (format == DatasetFormat::GenericCsv) {
    return read_generic_csv(path, layout, up, unit_scale).frames;
  }
  const bool cad = format == DatasetFormat::Cad60 || format == DatasetFormat::Cad120;
  if (cad && layout.num_joints() != 15) {
    throw Error(ErrorKind::InvalidArgument, "CAD formats carry exactly 15 joints");
  }
  auto in = open_input(path);
  std::vector<Frame> frames;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t == "END") break;
    const auto values = numbers(tokens(t), path, line_no);
    if (cad) {
      frames.push_back(parse_cad_frame(values, path, line_no, up, unit_scale));
    } else {
      const bool optional_id = format == DatasetFormat::Tst;
      frames.push_back(parse_plain_frame(values, layout.num_joints(), optional_id,
                                         static_cast<int>(frames.size()), path, line_no, up,
                                         unit_scale));
    }
  }
  return frames;
}

DatasetManifest load_manifest(const fs::path& path) {
  auto in = open_input(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
  try {
    DatasetManifest m;
    m.format = parse_format(j.at("format").get<std::string>());
    const FormatDefaults d = format_defaults(m.format);
    const fs::path base = path.parent_path();
    const fs::path root = j.contains("root") ? fs::path(j.at("root").get<std::string>()) : fs::path();
    m.root = root.is_absolute() ? root : base / root;

    if (j.contains("layout")) {
      const auto& jl = j.at("layout");
      m.layout = jl.is_string() ? builtin_layout(jl.get<std::string>()) : SkeletonLayout::from_json(jl);
    } else {
      m.layout = builtin_layout(d.layout);
    }
    m.up_axis = d.up;
    if (j.contains("up_axis")) {
      const auto up = j.at("up_axis").get<std::string>();
      if (up != "y" && up != "z") throw Error(ErrorKind::ParseError, "up_axis must be 'y' or 'z'");
      m.up_axis = up == "y" ? UpAxis::Y : UpAxis::Z;
    }
    m.unit_scale = d.scale;
    if (j.contains("units")) {
      const auto u = j.at("units").get<std::string>();
      if (u == "m") m.unit_scale = 1.0;
      else if (u == "mm") m.unit_scale = 1e-3;
      else throw Error(ErrorKind::ParseError, "units must be 'm' or 'mm'");
    }
    if (j.contains("classes")) m.class_names = j.at("classes").get<std::vector<std::string>>();

    for (const auto& je : j.at("entries")) {
      ManifestEntry e;
      e.file = m.root / je.at("file").get<std::string>();
      const auto& label = je.at("label");
      e.label = label.is_string() ? label.get<std::string>() : std::to_string(label.get<int>());
      e.subject = je.at("subject").get<int>();
      e.sample_index = je.value("sample_index", 0);
      e.group = je.value("group", std::string());
      if (je.contains("segment")) {
        const auto seg = je.at("segment").get<std::vector<int>>();
        if (seg.size() != 2 || seg[0] > seg[1]) {
          throw Error(ErrorKind::ParseError, "segment must be [first, last] with first <= last");
        }
        e.segment = std::array<int, 2>{seg[0], seg[1]};
      }
      if (je.contains("objects")) e.objects = m.root / je.at("objects").get<std::string>();
      m.entries.push_back(std::move(e));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
}

void write_manifest(const fs::path& path, const DatasetManifest& manifest) {
  nlohmann::json j;
  j["format"] = std::string(to_string(manifest.format));
  j["root"] = manifest.root.string();
  j["layout"] = manifest.layout.name == "openni15" || manifest.layout.name == "kinect20" ||
                        manifest.layout.name == "kinect25"
                    ? nlohmann::json(manifest.layout.name)
                    : manifest.layout.to_json();
  j["up_axis"] = manifest.up_axis == UpAxis::Y ? "y" : "z";
  j["units"] = manifest.unit_scale == 1.0 ? "m" : "mm";
  if (!manifest.class_names.empty()) j["classes"] = manifest.class_names;
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : manifest.entries) {
    nlohmann::json je{{"file", e.file.string()},
                      {"label", e.label},
                      {"subject", e.subject},
                      {"sample_index", e.sample_index}};
    if (!e.group.empty()) je["group"] = e.group;
    if (e.segment) je["segment"] = {(*e.segment)[0], (*e.segment)[1]};
    if (e.objects) je["objects"] = e.objects->string();
    entries.push_back(std::move(je));
  }
  j["entries"] = std::move(entries);
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::MissingFile, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

Dataset load_dataset(const DatasetManifest& manifest) {
  Dataset ds;
  ds.format = manifest.format;
  ds.layout = manifest.layout;

  // Label map.
  std::map<std::string, int> label_of;
  if (!manifest.class_names.empty()) {
    ds.class_names = manifest.class_names;
    for (std::size_t c = 0; c < ds.class_names.size(); ++c) {
      label_of[ds.class_names[c]] = static_cast<int>(c + 1);
    }
    // Integer labels may also index the class list directly.
    for (const auto& e : manifest.entries) {
      if (label_of.contains(e.label)) continue;
      int v = 0;
      auto [ptr, ec] = std::from_chars(e.label.data(), e.label.data() + e.label.size(), v);
      if (ec != std::errc() || ptr != e.label.data() + e.label.size() || v < 1 ||
          v > static_cast<int>(ds.class_names.size())) {
        throw Error(ErrorKind::LabelMapError, "label '" + e.label + "' is not a listed class");
      }
      label_of[e.label] = v;
    }
  } else {
    std::set<std::string> distinct;
    for (const auto& e : manifest.entries) distinct.insert(e.label);
    bool all_int = true;
    std::set<int> ints;
    for (const auto& s : distinct) {
      int v = 0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        all_int = false;
        break;
      }
      ints.insert(v);
    }
    if (all_int && !ints.empty()) {
      if (*ints.begin() != 1 || *ints.rbegin() != static_cast<int>(ints.size())) {
        throw Error(ErrorKind::LabelMapError, "integer labels must form the contiguous set 1..C");
      }
      for (int v : ints) ds.class_names.push_back(std::to_string(v));
      for (const auto& s : distinct) label_of[s] = std::stoi(s);
    } else {
      int next = 1;
      for (const auto& s : distinct) {
        ds.class_names.push_back(s);
        label_of[s] = next++;
      }
    }
  }

  std::uint64_t uid = 1;
  for (const auto& e : manifest.entries) {
    if (!fs::exists(e.file)) throw Error(ErrorKind::MissingFile, "missing " + e.file.string());
    RawSequence seq;
    std::vector<std::string> inline_ids;
    if (manifest.format == DatasetFormat::GenericCsv) {
      RawSequence parsed = read_generic_csv(e.file, manifest.layout, manifest.up_axis,
                                            manifest.unit_scale);
      seq.frames = std::move(parsed.frames);
      inline_ids = std::move(parsed.object_ids);
    } else {
      seq.frames = read_skeleton_file(e.file, manifest.format, manifest.layout,
                                      manifest.up_axis, manifest.unit_scale);
    }
    seq.object_ids = inline_ids;
    if (e.segment) {
      const auto [first, last] = *e.segment;
      std::erase_if(seq.frames, [&](const Frame& f) {
        return f.timestamp_index < first || f.timestamp_index > last;
      });
    }
    if (seq.frames.empty()) {
      throw Error(ErrorKind::ParseError, e.file.string() + ": no frames (after segmentation)");
    }

    if (e.objects) {
      if (!fs::exists(*e.objects)) {
        throw Error(ErrorKind::MissingFile, "missing " + e.objects->string());
      }
      if (!inline_ids.empty()) {
        throw Error(ErrorKind::ParseError,
                    e.file.string() + ": objects given both inline and in a separate file");
      }
      ObjectTrajectories obj = read_object_file(*e.objects, manifest.up_axis);
      std::vector<std::size_t> keep;
      for (std::size_t r = 0; r < obj.frame_ids.size(); ++r) {
        if (!e.segment || (obj.frame_ids[r] >= (*e.segment)[0] && obj.frame_ids[r] <= (*e.segment)[1])) {
          keep.push_back(r);
        }
      }
      if (keep.size() != seq.frames.size()) {
        throw Error(ErrorKind::ParseError,
                    e.objects->string() + ": " + std::to_string(keep.size()) +
                        " object frames for " + std::to_string(seq.frames.size()) +
                        " skeleton frames");
      }
      for (std::size_t i = 0; i < keep.size(); ++i) {
        if (obj.frame_ids[keep[i]] != seq.frames[i].timestamp_index) {
          throw Error(ErrorKind::ParseError,
                      e.objects->string() + ": frame ids do not match the skeleton file");
        }
        seq.frames[i].objects = obj.positions[keep[i]];
      }
      seq.object_ids = obj.ids;
    }

    seq.class_label = label_of.at(e.label);
    seq.subject_id = e.subject;
    seq.sample_index = e.sample_index;
    seq.group = e.group;
    seq.uid = uid++;
    ds.sequences.push_back(std::move(seq));
  }
  return ds;
}

}  // namespace skelwarp
