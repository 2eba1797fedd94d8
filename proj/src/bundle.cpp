#include "skelwarp/bundle.hpp"

#include <zlib.h>

#include <fstream>
#include <sstream>

#include "skelwarp/error.hpp"

namespace skelwarp {
namespace {

using Json = nlohmann::json;

constexpr const char* kManifest = "manifest.json";
constexpr const char* kFormatName = "skelwarp.model";

std::uint32_t crc_of(const std::string& bytes) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::CorruptBundle, "missing bundle file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
  out << bytes;
}

Json templates_json(const TrainedModel& m) {
  Json list = Json::array();
  for (std::size_t i = 0; i < m.templates.size(); ++i) {
    const ActionTemplate& t = m.templates[i];
    list.push_back({{"class_label", t.class_label},
                    {"mirrored", t.mirrored},
                    {"mean_sample_lengths", m.mean_sample_lengths[i]},
                    {"sub_signals", t.sub_signals}});
  }
  const std::size_t k = m.templates.empty() ? 0 : m.templates.front().sub_signals.size();
  return {{"K", k},
          {"C", m.class_names.size()},
          {"class_names", m.class_names},
          {"templates", std::move(list)}};
}

Json wavelet_json(const WaveletSpec& w) {
  return {{"family", std::string(short_name(w.family))}, {"order", w.order}, {"levels", w.levels}};
}

}  // namespace

void save_model(const TrainedModel& model, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  Json meta = {{"class_names", model.class_names},
               {"max_objects", model.max_objects},
               {"mirroring", model.mirroring},
               {"training_uids", model.training_uids},
               {"warnings", model.warnings}};
  if (model.tuning) {
    Json grid = Json::array();
    for (double s : model.tuning->scores) grid.push_back(s);
    meta["tuning"] = {{"best", to_string(model.tuning->best)},
                      {"scores", std::move(grid)},
                      {"first_group", model.tuning->first_group}};
  }
  const std::vector<std::pair<std::string, Json>> files{
      {"config.json", to_json(model.config)},
      {"layout.json", model.layout.to_json()},
      {"templates.json", templates_json(model)},
      {"wavelet.json", wavelet_json(model.wavelet)},
      {"forest.json", model.forest.to_json()},
      {"model.json", meta}};

  Json manifest = {{"format", kFormatName}, {"format_version", kBundleFormatVersion}};
  Json checksums = Json::object();
  for (const auto& [name, j] : files) {
    const std::string bytes = j.dump(1) + "\n";
    write_file(dir / name, bytes);
    checksums[name] = crc_of(bytes);
  }
  manifest["files"] = std::move(checksums);
  write_file(dir / kManifest, manifest.dump(2) + "\n");
}

TrainedModel load_model(const std::filesystem::path& dir) {
  Json manifest;
  try {
    manifest = Json::parse(read_file(dir / kManifest));
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::CorruptBundle, "unreadable bundle manifest: " + std::string(e.what()));
  }
  if (manifest.value("format", std::string()) != kFormatName) {
    throw Error(ErrorKind::CorruptBundle, dir.string() + " is not a model bundle");
  }
  const int version = manifest.value("format_version", -1);
  if (version != kBundleFormatVersion) {
    throw Error(ErrorKind::VersionMismatch,
                "bundle format version " + std::to_string(version) + ", expected " +
                    std::to_string(kBundleFormatVersion));
  }

  auto load = [&](const std::string& name) {
    const auto files = manifest.find("files");
    if (files == manifest.end() || !files->contains(name)) {
      throw Error(ErrorKind::CorruptBundle, "bundle manifest does not list " + name);
    }
    const std::string bytes = read_file(dir / name);
    if (crc_of(bytes) != (*files)[name].get<std::uint32_t>()) {
      throw Error(ErrorKind::CorruptBundle, "checksum mismatch in " + name);
    }
    return Json::parse(bytes);
  };

  TrainedModel m;
  try {
    m.config = config_from_json(load("config.json"));
    m.layout = SkeletonLayout::from_json(load("layout.json"));

    const Json meta = load("model.json");
    m.class_names = meta.at("class_names").get<std::vector<std::string>>();
    m.max_objects = meta.at("max_objects").get<std::size_t>();
    m.mirroring = meta.at("mirroring").get<bool>();
    m.training_uids = meta.at("training_uids").get<std::vector<std::uint64_t>>();
    m.warnings = meta.at("warnings").get<std::vector<std::string>>();

    const Json t = load("templates.json");
    const auto k = t.at("K").get<std::size_t>();
    for (const auto& item : t.at("templates")) {
      ActionTemplate at;
      at.class_label = item.at("class_label").get<int>();
      at.mirrored = item.at("mirrored").get<bool>();
      at.sub_signals = item.at("sub_signals").get<MultiSignal>();
      if (at.sub_signals.size() != k) {
        throw Error(ErrorKind::CorruptBundle, "template has the wrong number of sub-signals");
      }
      m.mean_sample_lengths.push_back(
          item.at("mean_sample_lengths").get<std::vector<std::size_t>>());
      m.templates.push_back(std::move(at));
    }

    const Json w = load("wavelet.json");
    m.wavelet.family = parse_family(w.at("family").get<std::string>());
    m.wavelet.order = w.at("order").get<int>();
    m.wavelet.levels = w.at("levels").get<int>();
    scaling_filter(m.wavelet.family, m.wavelet.order);

    m.forest = ForestModel::from_json(load("forest.json"));
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::CorruptBundle, "malformed bundle: " + std::string(e.what()));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::CorruptBundle) throw;
    throw Error(ErrorKind::CorruptBundle, "malformed bundle: " + std::string(e.what()));
  }
  if (m.forest.feature_dimension() != feature_length(m.templates, m.wavelet)) {
    throw Error(ErrorKind::CorruptBundle, "forest feature dimension does not match templates");
  }
  return m;
}

}  // namespace skelwarp
