// Python bindings. Signals are 1-D float64 arrays; feature matrices are 2-D.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "skelwarp/bundle.hpp"
#include "skelwarp/dtw.hpp"
#include "skelwarp/error.hpp"
#include "skelwarp/evaluation.hpp"
#include "skelwarp/filtering.hpp"
#include "skelwarp/forest.hpp"
#include "skelwarp/synthetic.hpp"
#include "skelwarp/wavelet.hpp"

namespace py = pybind11;
using namespace skelwarp;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw Error(ErrorKind::InvalidArgument, "expected a 1-D array");
  return {a.data(), a.data() + a.size()};
}

Array to_array(const std::vector<double>& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::vector<FeatureVector> to_rows(const Array& x) {
  if (x.ndim() != 2) throw Error(ErrorKind::InvalidArgument, "expected a 2-D array");
  const auto rows = static_cast<std::size_t>(x.shape(0));
  const auto cols = static_cast<std::size_t>(x.shape(1));
  std::vector<FeatureVector> out(rows);
  for (std::size_t r = 0; r < rows; ++r) out[r].assign(x.data() + r * cols, x.data() + (r + 1) * cols);
  return out;
}

DtwOptions band_options(std::optional<std::size_t> band) {
  DtwOptions o;
  o.band = band;
  return o;
}

PipelineConfig parse_config(const std::string& text) {
  if (text.empty()) return PipelineConfig{};
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigError, e.what());
  }
  return config_from_json(j);
}

WaveletSpec spec_of(const std::string& family, std::optional<int> order, int levels) {
  const WaveletFamily f = parse_family(family);
  return {f, order.value_or(default_order(f)), levels};
}

}  // namespace

PYBIND11_MODULE(skelwarp, m) {
  m.doc() = "Skeleton action recognition with DTW templates and wavelet forests";

  // Leaked on purpose: the type must outlive every translator call.
  static PyObject* error_type =
      py::exception<Error>(m, "Error", PyExc_RuntimeError).release().ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::gil_scoped_acquire gil;
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(
          std::string(to_string(e.kind())) + ": " + e.what());
      exc.attr("kind") = to_string(e.kind());
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  m.def(
      "dtw",
      [](const Array& a, const Array& b, std::optional<std::size_t> band) {
        const auto r = dtw(to_vector(a), to_vector(b), band_options(band));
        return py::make_tuple(r.distance, r.path.source, r.path.base);
      },
      py::arg("a"), py::arg("b"), py::arg("band") = py::none(),
      "Returns (distance, source indices, base indices) of the optimal path.");
  m.def(
      "dtw_distance",
      [](const Array& a, const Array& b, std::optional<std::size_t> band) {
        return dtw_distance(to_vector(a), to_vector(b), band_options(band));
      },
      py::arg("a"), py::arg("b"), py::arg("band") = py::none());
  m.def(
      "warp_signal",
      [](const Array& source, const Array& base, std::optional<std::size_t> band) {
        return to_array(warp_signal(to_vector(source), to_vector(base), band_options(band)));
      },
      py::arg("source"), py::arg("base"), py::arg("band") = py::none());

  m.def(
      "median_filter",
      [](const Array& x, int window) { return to_array(median_filter(to_vector(x), window)); },
      py::arg("x"), py::arg("window"));
  m.def(
      "savgol_filter",
      [](const Array& x, int window, int order) {
        return to_array(savgol_filter(to_vector(x), window, order));
      },
      py::arg("x"), py::arg("window"), py::arg("order"));

  m.def(
      "wavedec",
      [](const Array& x, const std::string& family, std::optional<int> order, int levels) {
        std::vector<Array> out;
        for (const auto& c : wavedec(to_vector(x), spec_of(family, order, levels))) out.push_back(to_array(c));
        return out;
      },
      py::arg("x"), py::arg("family") = "db", py::arg("order") = py::none(), py::arg("levels") = 3,
      "Returns [A_levels, D_levels, ..., D_1] with symmetric extension.");
  m.def(
      "scaling_filter",
      [](const std::string& family, int order) {
        const auto f = scaling_filter(parse_family(family), order);
        return to_array({f.begin(), f.end()});
      },
      py::arg("family"), py::arg("order"));

  py::class_<ForestModel>(m, "Forest")
      .def_property_readonly("class_labels", &ForestModel::class_labels)
      .def_property_readonly("feature_dimension", &ForestModel::feature_dimension)
      .def_property_readonly("n_trees", [](const ForestModel& f) { return f.trees().size(); })
      .def_property_readonly("oob_error", &ForestModel::oob_error)
      .def("predict",
           [](const ForestModel& f, const Array& x) {
             std::vector<int> out;
             for (const auto& row : to_rows(x)) out.push_back(f.predict(row));
             return out;
           })
      .def("predict_proba",
           [](const ForestModel& f, const Array& x) {
             std::vector<std::vector<double>> out;
             for (const auto& row : to_rows(x)) out.push_back(f.predict_proba(row));
             return out;
           })
      .def("to_json", [](const ForestModel& f) { return f.to_json().dump(); });
  m.def(
      "train_forest",
      [](const Array& x, const std::vector<int>& y, int n_trees, int features_per_split,
         int max_depth, int min_samples_leaf, std::uint64_t seed, unsigned jobs) {
        ForestParams p;
        p.n_trees = n_trees;
        p.features_per_split = features_per_split;
        p.max_depth = max_depth;
        p.min_samples_leaf = min_samples_leaf;
        p.seed = seed;
        const auto rows = to_rows(x);
        py::gil_scoped_release release;
        return train_forest(rows, y, p, jobs);
      },
      py::arg("x"), py::arg("y"), py::arg("n_trees") = 500, py::arg("features_per_split") = 0,
      py::arg("max_depth") = 0, py::arg("min_samples_leaf") = 1, py::arg("seed") = 0x5EED,
      py::arg("jobs") = 1);

  m.def(
      "write_synthetic",
      [](const std::filesystem::path& out, int classes, int subjects, int reps, double noise,
         std::uint64_t seed) {
        SyntheticSpec spec;
        spec.n_classes = classes;
        spec.n_subjects = subjects;
        spec.reps = reps;
        spec.noise = noise;
        const Dataset ds = generate_synthetic(spec, seed);
        std::filesystem::create_directories(out);
        DatasetManifest man;
        man.format = DatasetFormat::GenericCsv;
        man.root = ".";
        man.layout = ds.layout;
        man.class_names = ds.class_names;
        for (const auto& s : ds.sequences) {
          const std::string file = "s" + std::to_string(s.subject_id) + "_c" +
                                   std::to_string(s.class_label) + "_r" +
                                   std::to_string(s.sample_index) + ".csv";
          write_generic_csv(out / file, s, ds.layout);
          ManifestEntry e;
          e.file = file;
          e.label = ds.class_names[static_cast<std::size_t>(s.class_label - 1)];
          e.subject = s.subject_id;
          e.sample_index = s.sample_index;
          man.entries.push_back(std::move(e));
        }
        write_manifest(out / "manifest.json", man);
        return out / "manifest.json";
      },
      py::arg("out"), py::arg("classes") = 3, py::arg("subjects") = 4, py::arg("reps") = 5,
      py::arg("noise") = 0.02, py::arg("seed") = 1,
      "Writes a synthetic generic-csv dataset and returns its manifest path.");

  py::class_<TrainedModel>(m, "Model")
      .def_readonly("class_names", &TrainedModel::class_names)
      .def_property_readonly("feature_dimension", &TrainedModel::feature_dimension)
      .def_property_readonly("wavelet", [](const TrainedModel& t) { return to_string(t.wavelet); })
      .def(
          "predict_file",
          [](const TrainedModel& t, const std::filesystem::path& sample, const std::string& format) {
            const DatasetFormat f = parse_format(format);
            const FormatDefaults d = format_defaults(f);
            RawSequence seq;
            seq.frames = read_skeleton_file(sample, f, t.layout, d.up, d.scale);
            const Prediction p = t.predict(seq);
            return py::make_tuple(p.label, t.class_names.at(static_cast<std::size_t>(p.label - 1)));
          },
          py::arg("sample"), py::arg("format") = "generic-csv")
      .def("save", [](const TrainedModel& t, const std::filesystem::path& dir) { save_model(t, dir); });

  m.def(
      "train",
      [](const std::filesystem::path& manifest, const std::string& config_json, unsigned jobs) {
        const PipelineConfig config = parse_config(config_json);
        const Dataset ds = load_dataset(load_manifest(manifest));
        TrainOptions opts;
        opts.jobs = jobs;
        opts.default_mirroring = default_mirroring(ds.format);
        py::gil_scoped_release release;
        return train_model(ds.sequences, ds.layout, ds.class_names, config, opts);
      },
      py::arg("manifest"), py::arg("config_json") = "", py::arg("jobs") = 1);
  m.def("load_model", [](const std::filesystem::path& dir) { return load_model(dir); }, py::arg("dir"));

  m.def(
      "evaluate",
      [](const std::filesystem::path& manifest, const std::string& config_json, unsigned jobs) {
        const PipelineConfig config = parse_config(config_json);
        const Dataset ds = load_dataset(load_manifest(manifest));
        std::string report;
        {
          py::gil_scoped_release release;
          report = to_json(run_protocol(ds, config, Protocol::from_config(config), jobs)).dump();
        }
        return py::module_::import("json").attr("loads")(report);
      },
      py::arg("manifest"), py::arg("config_json") = "", py::arg("jobs") = 1,
      "Runs the configured protocol and returns the report as a dict.");
}
