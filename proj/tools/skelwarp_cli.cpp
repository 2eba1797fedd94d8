// skelwarp command-line tool. Results go to stdout, diagnostics to stderr.
// Exit codes are listed in README.md.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <thread>

#include "skelwarp/bundle.hpp"
#include "skelwarp/error.hpp"
#include "skelwarp/evaluation.hpp"
#include "skelwarp/synthetic.hpp"

namespace fs = std::filesystem;
using namespace skelwarp;

namespace {

enum Exit : int { kOk = 0, kGeneric = 1, kUsage = 2, kConfig = 3, kData = 4, kBundle = 5, kPipeline = 6 };

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigError:
    case ErrorKind::InvalidSpec: return kConfig;
    case ErrorKind::ParseError:
    case ErrorKind::MissingFile:
    case ErrorKind::LabelMapError: return kData;
    case ErrorKind::VersionMismatch:
    case ErrorKind::CorruptBundle: return kBundle;
    default: return kPipeline;
  }
}

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::string report_out;
};

PipelineConfig load_pipeline_config(const Globals& g) {
  PipelineConfig c = g.config.empty() ? PipelineConfig{} : load_config(g.config);
  if (g.seed) c.seed = *g.seed;
  c.forest.seed = c.seed;
  return c;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::MissingFile, "cannot write " + path);
  out << text;
}

int cmd_train(const Globals& g, const std::string& manifest, const std::string& out) {
  const PipelineConfig config = load_pipeline_config(g);
  const Dataset ds = load_dataset(load_manifest(manifest));
  TrainOptions opts;
  opts.jobs = g.jobs;
  opts.default_mirroring = default_mirroring(ds.format);
  const TrainedModel model = train_model(ds.sequences, ds.layout, ds.class_names, config, opts);
  for (const auto& w : model.warnings) std::cerr << "warning: " << w << '\n';
  save_model(model, out);
  std::cout << "trained on " << ds.sequences.size() << " sequences, " << model.templates.size()
            << " templates, wavelet " << to_string(model.wavelet) << ", "
            << model.feature_dimension() << " features\n"
            << "model written to " << out << '\n';
  return kOk;
}

struct EvalArgs {
  std::string manifest;
  std::string protocol;
  std::optional<int> folds;
  std::optional<int> repeats;
  std::optional<double> train_fraction;
  bool per_group = false;
};

int cmd_eval(const Globals& g, const EvalArgs& a) {
  PipelineConfig config = load_pipeline_config(g);
  if (!a.protocol.empty()) config.protocol.kind = parse_protocol(a.protocol);
  if (a.folds) config.protocol.folds = *a.folds;
  if (a.repeats) config.protocol.repeats = *a.repeats;
  if (a.train_fraction) config.protocol.train_fraction = *a.train_fraction;
  const Dataset ds = load_dataset(load_manifest(a.manifest));
  const Protocol protocol = Protocol::from_config(config);

  std::string text;
  nlohmann::json json;
  if (a.per_group) {
    const GroupedReport r = run_grouped(ds, config, protocol, g.jobs);
    text = to_text(r);
    json = to_json(r);
  } else {
    const EvalReport r = run_protocol(ds, config, protocol, g.jobs);
    text = to_text(r);
    json = to_json(r);
  }
  std::cout << text;
  if (!g.report_out.empty()) write_text(g.report_out, json.dump(2) + "\n");
  return kOk;
}

struct PredictArgs {
  std::string model;
  std::string sample;
  std::string format = "generic-csv";
  std::string objects;
};

int cmd_predict(const Globals& g, const PredictArgs& a) {
  const TrainedModel model = load_model(a.model);
  const DatasetFormat format = parse_format(a.format);
  const FormatDefaults d = format_defaults(format);
  RawSequence seq;
  seq.frames = read_skeleton_file(a.sample, format, model.layout, d.up, d.scale);
  if (!a.objects.empty()) {
    const ObjectTrajectories obj = read_object_file(a.objects, d.up);
    if (obj.frame_ids.size() != seq.frames.size()) {
      throw Error(ErrorKind::ParseError, "object file frame count does not match the sample");
    }
    for (std::size_t f = 0; f < seq.frames.size(); ++f) seq.frames[f].objects = obj.positions[f];
  }
  const Prediction p = model.predict(seq, g.jobs);
  const auto name = [&](int label) { return model.class_names.at(static_cast<std::size_t>(label - 1)); };
  std::cout << "label " << p.label << ' ' << name(p.label) << '\n';
  std::ostringstream json_fracs;
  for (std::size_t i = 0; i < p.class_labels.size(); ++i) {
    std::cout << "  " << std::left << std::setw(20) << name(p.class_labels[i]) << std::right
              << std::fixed << std::setprecision(3) << p.fractions[i] << '\n';
  }
  if (!g.report_out.empty()) {
    nlohmann::json j{{"label", p.label}, {"class", name(p.label)}};
    for (std::size_t i = 0; i < p.class_labels.size(); ++i) {
      j["fractions"][name(p.class_labels[i])] = p.fractions[i];
    }
    write_text(g.report_out, j.dump(2) + "\n");
  }
  return kOk;
}

int cmd_synth(const Globals& g, const SyntheticSpec& spec, const std::string& out) {
  const Dataset ds = generate_synthetic(spec, g.seed.value_or(1));
  fs::create_directories(out);
  DatasetManifest m;
  m.format = DatasetFormat::GenericCsv;
  m.root = ".";
  m.layout = ds.layout;
  m.up_axis = UpAxis::Z;
  m.unit_scale = 1.0;
  m.class_names = ds.class_names;
  for (const auto& s : ds.sequences) {
    const std::string file = "s" + std::to_string(s.subject_id) + "_c" +
                             std::to_string(s.class_label) + "_r" +
                             std::to_string(s.sample_index) + ".csv";
    write_generic_csv(fs::path(out) / file, s, ds.layout);
    ManifestEntry e;
    e.file = file;
    e.label = ds.class_names.at(static_cast<std::size_t>(s.class_label - 1));
    e.subject = s.subject_id;
    e.sample_index = s.sample_index;
    e.group = s.group;
    m.entries.push_back(std::move(e));
  }
  write_manifest(fs::path(out) / "manifest.json", m);
  std::cout << "wrote " << ds.sequences.size() << " sequences to " << out << '\n';
  return kOk;
}

int cmd_inspect(const std::string& dir) {
  const TrainedModel m = load_model(dir);
  std::cout << "layout        " << m.layout.name << " (" << m.layout.num_joints() << " joints)\n"
            << "classes       " << m.class_names.size() << '\n';
  for (std::size_t c = 0; c < m.class_names.size(); ++c) {
    std::cout << "  " << c + 1 << ' ' << m.class_names[c] << '\n';
  }
  std::cout << "objects       " << m.max_objects << '\n'
            << "mirroring     " << (m.mirroring ? "on" : "off") << '\n'
            << "wavelet       " << to_string(m.wavelet) << '\n'
            << "templates     " << m.templates.size() << '\n';
  for (const auto& t : m.templates) {
    const auto lengths = t.lengths();
    const auto [lo, hi] = std::minmax_element(lengths.begin(), lengths.end());
    std::cout << "  class " << t.class_label << (t.mirrored ? " mirrored" : "") << ": K="
              << t.sub_signals.size() << ", length " << (lengths.empty() ? 0 : *lo);
    if (!lengths.empty() && *hi != *lo) std::cout << ".." << *hi;
    std::cout << '\n';
  }
  std::cout << "features      " << m.feature_dimension() << '\n'
            << "trees         " << m.forest.trees().size() << '\n'
            << "training uids " << m.training_uids.size() << '\n';
  for (const auto& w : m.warnings) std::cout << "warning       " << w << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"skelwarp: skeleton action recognition with DTW templates and wavelet forests"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Pipeline config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Seed overriding the config");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--report-out", g.report_out, "Write a JSON report here");
  app.fallthrough();

  std::string manifest;
  std::string out;
  auto* train = app.add_subcommand("train", "Train a model bundle from a dataset");
  train->add_option("--manifest", manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  train->add_option("--out", out, "Bundle directory")->required();

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Run a cross-validation protocol");
  eval->add_option("--manifest", ev.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  eval->add_option("--protocol", ev.protocol, "losubo, kfold, loseqo or holdout");
  eval->add_option("--folds", ev.folds, "Folds for kfold")->check(CLI::Range(2, 1000000));
  eval->add_option("--repeats", ev.repeats, "Repetitions")->check(CLI::PositiveNumber);
  eval->add_option("--train-fraction", ev.train_fraction, "Train share for holdout")
      ->check(CLI::Range(0.0, 1.0));
  eval->add_flag("--per-group", ev.per_group, "Evaluate each manifest group separately");

  PredictArgs pr;
  auto* predict = app.add_subcommand("predict", "Classify one sample");
  predict->add_option("--model", pr.model, "Bundle directory")->required();
  predict->add_option("--sample", pr.sample, "Skeleton file")->required()->check(CLI::ExistingFile);
  predict->add_option("--format", pr.format, "Sample file format");
  predict->add_option("--objects", pr.objects, "Object trajectory file")->check(CLI::ExistingFile);

  SyntheticSpec spec;
  auto* synth = app.add_subcommand("synth", "Write a synthetic dataset");
  synth->add_option("--out", out, "Output directory")->required();
  synth->add_option("--classes", spec.n_classes);
  synth->add_option("--subjects", spec.n_subjects);
  synth->add_option("--reps", spec.reps);
  synth->add_option("--noise", spec.noise, "Noise sigma in meters");
  synth->add_option("--speed-min", spec.speed_min);
  synth->add_option("--speed-max", spec.speed_max);
  synth->add_option("--style", spec.style, "Per-subject style offset scale");
  synth->add_flag("--balanced-handedness", spec.balanced_handedness);

  std::string model_dir;
  auto* inspect = app.add_subcommand("inspect", "Describe a model bundle");
  inspect->add_option("--model", model_dir, "Bundle directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*train) return cmd_train(g, manifest, out);
    if (*eval) return cmd_eval(g, ev);
    if (*predict) return cmd_predict(g, pr);
    if (*synth) return cmd_synth(g, spec, out);
    if (*inspect) return cmd_inspect(model_dir);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kGeneric;
  }
  return kUsage;
}
