#include "skelwarp/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "skelwarp/error.hpp"
#include "skelwarp/pipeline.hpp"
#include "skelwarp/random.hpp"

namespace skelwarp {

Protocol Protocol::from_config(const PipelineConfig& config) {
  Protocol p;
  p.kind = config.protocol.kind;
  p.folds = config.protocol.folds;
  p.train_fraction = config.protocol.train_fraction;
  p.repeats = config.protocol.repeats;
  p.seed = config.seed;
  return p;
}

namespace {

template <typename Key>
std::vector<Fold> hold_out_each(std::span<const RawSequence> data,
                                const std::vector<std::vector<Key>>& test_keys,
                                auto key_of) {
  std::vector<Fold> folds;
  for (const auto& keys : test_keys) {
    Fold f;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const bool held = std::find(keys.begin(), keys.end(), key_of(data[i])) != keys.end();
      (held ? f.test : f.train).push_back(i);
    }
    folds.push_back(std::move(f));
  }
  return folds;
}

}  // namespace

std::vector<Fold> make_folds(std::span<const RawSequence> data, const Protocol& protocol,
                             int repeat) {
  std::set<int> subject_set;
  for (const auto& s : data) subject_set.insert(s.subject_id);
  std::vector<int> subjects(subject_set.begin(), subject_set.end());
  Rng rng(derive_seed(protocol.seed, static_cast<std::uint64_t>(repeat)));

  switch (protocol.kind) {
    case ProtocolKind::LOSubO: {
      if (subjects.size() < 2) {
        throw Error(ErrorKind::InsufficientSubjects, "leave-one-subject-out needs >= 2 subjects");
      }
      std::vector<std::vector<int>> keys;
      for (int s : subjects) keys.push_back({s});
      return hold_out_each(data, keys, [](const RawSequence& r) { return r.subject_id; });
    }
    case ProtocolKind::CrossSubjectKFold: {
      const auto k = static_cast<std::size_t>(protocol.folds);
      if (k < 2 || subjects.size() < k) {
        throw Error(ErrorKind::InsufficientSubjects,
                    std::to_string(k) + "-fold cross-subject validation needs >= " +
                        std::to_string(k) + " subjects");
      }
      for (std::size_t i = subjects.size(); i > 1; --i) {
        std::swap(subjects[i - 1], subjects[rng.index(i)]);
      }
      std::vector<std::vector<int>> keys(k);
      for (std::size_t i = 0; i < subjects.size(); ++i) keys[i % k].push_back(subjects[i]);
      for (auto& g : keys) std::sort(g.begin(), g.end());
      return hold_out_each(data, keys, [](const RawSequence& r) { return r.subject_id; });
    }
    case ProtocolKind::LOSeqO: {
      std::set<std::pair<int, int>> seqs;
      for (const auto& s : data) seqs.insert({s.subject_id, s.sample_index});
      if (seqs.size() < 2) {
        throw Error(ErrorKind::InsufficientSubjects, "leave-one-sequence-out needs >= 2 sequences");
      }
      std::vector<std::vector<std::pair<int, int>>> keys;
      for (const auto& p : seqs) keys.push_back({p});
      return hold_out_each(data, keys, [](const RawSequence& r) {
        return std::pair<int, int>{r.subject_id, r.sample_index};
      });
    }
    case ProtocolKind::Holdout: {
      if (data.size() < 2) {
        throw Error(ErrorKind::InsufficientSubjects, "holdout needs >= 2 samples");
      }
      std::vector<std::size_t> order(data.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
      auto n_train = static_cast<std::size_t>(
          std::lround(protocol.train_fraction * static_cast<double>(data.size())));
      n_train = std::clamp<std::size_t>(n_train, 1, data.size() - 1);
      Fold f;
      f.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
      f.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
      std::sort(f.train.begin(), f.train.end());
      std::sort(f.test.begin(), f.test.end());
      return {f};
    }
  }
  return {};
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.size() != size()) {
    throw Error(ErrorKind::DimensionMismatch, "confusion matrices differ in size");
  }
  for (std::size_t r = 0; r < size(); ++r) {
    for (std::size_t c = 0; c < size(); ++c) counts[r][c] += other.counts[r][c];
  }
  return *this;
}

long long ConfusionMatrix::total() const {
  long long t = 0;
  for (const auto& row : counts) t = std::accumulate(row.begin(), row.end(), t);
  return t;
}

Metrics metrics(const std::vector<std::vector<long long>>& matrix) {
  const std::size_t n = matrix.size();
  for (const auto& row : matrix) {
    if (row.size() != n) throw Error(ErrorKind::NonSquareMatrix, "confusion matrix is not square");
    for (long long v : row) {
      if (v < 0) throw Error(ErrorKind::InvalidArgument, "confusion counts must be >= 0");
    }
  }
  Metrics m;
  m.per_class.resize(n);
  long long diag = 0;
  long long total = 0;
  for (std::size_t c = 0; c < n; ++c) {
    long long row = 0;
    long long col = 0;
    for (std::size_t k = 0; k < n; ++k) {
      row += matrix[c][k];
      col += matrix[k][c];
      total += matrix[c][k];
    }
    diag += matrix[c][c];
    ClassScores& s = m.per_class[c];
    if (col == 0) {
      s.precision_undefined = true;
    } else {
      s.precision = static_cast<double>(matrix[c][c]) / static_cast<double>(col);
    }
    if (row == 0) {
      s.recall_undefined = true;
    } else {
      s.recall = static_cast<double>(matrix[c][c]) / static_cast<double>(row);
    }
    m.macro_precision += s.precision;
    m.macro_recall += s.recall;
  }
  if (n > 0) {
    m.macro_precision /= static_cast<double>(n);
    m.macro_recall /= static_cast<double>(n);
  }
  m.accuracy = total == 0 ? 0.0 : static_cast<double>(diag) / static_cast<double>(total);
  return m;
}

EvalReport run_protocol(const Dataset& dataset, const PipelineConfig& config,
                        const Protocol& protocol, unsigned jobs) {
  const std::size_t classes = dataset.class_names.size();
  EvalReport report;
  report.protocol = protocol;
  report.class_names = dataset.class_names;
  report.confusion = ConfusionMatrix(classes);
  report.config = to_json(config);

  for (int rep = 0; rep < protocol.repeats; ++rep) {
    const auto folds = make_folds(dataset.sequences, protocol, rep);
    for (std::size_t f = 0; f < folds.size(); ++f) {
      const Fold& fold = folds[f];
      std::vector<RawSequence> train;
      for (std::size_t i : fold.train) train.push_back(dataset.sequences[i]);

      PipelineConfig fold_config = config;
      fold_config.forest.seed =
          derive_seed(config.seed, static_cast<std::uint64_t>(rep) * 65536 + f);
      TrainOptions opts;
      opts.jobs = jobs;
      opts.default_mirroring = default_mirroring(dataset.format);

      FoldResult result;
      result.repeat = rep;
      result.fold = static_cast<int>(f);
      result.train_size = fold.train.size();
      result.test_size = fold.test.size();
      result.confusion = ConfusionMatrix(classes);
      TrainedModel model;
      try {
        model = train_model(train, dataset.layout, dataset.class_names, fold_config, opts);
      } catch (const Error& e) {
        throw Error(e.kind(), "repeat " + std::to_string(rep) + ", fold " + std::to_string(f) +
                                  ": " + e.what());
      }
      result.wavelet = model.wavelet;
      result.model_uids = model.training_uids;
      result.warnings = model.warnings;

      std::set<int> test_subjects;
      long long correct = 0;
      for (std::size_t i : fold.test) {
        const RawSequence& seq = dataset.sequences[i];
        test_subjects.insert(seq.subject_id);
        result.test_uids.push_back(seq.uid);
        const int predicted = model.predict(seq, jobs).label;
        result.confusion.add(static_cast<std::size_t>(seq.class_label - 1),
                             static_cast<std::size_t>(predicted - 1));
        if (predicted == seq.class_label) ++correct;
      }
      for (std::uint64_t uid : result.test_uids) {
        if (std::find(result.model_uids.begin(), result.model_uids.end(), uid) !=
            result.model_uids.end()) {
          throw Error(ErrorKind::InvalidArgument, "test sample leaked into training");
        }
      }
      result.test_subjects.assign(test_subjects.begin(), test_subjects.end());
      result.accuracy = fold.test.empty()
                            ? 0.0
                            : static_cast<double>(correct) / static_cast<double>(fold.test.size());
      report.confusion += result.confusion;
      report.folds.push_back(std::move(result));
    }
  }
  report.metrics = metrics(report.confusion.counts);
  double acc = 0.0;
  for (const auto& f : report.folds) acc += f.accuracy;
  report.accuracy = report.folds.empty() ? 0.0 : acc / static_cast<double>(report.folds.size());
  return report;
}

GroupedReport run_grouped(const Dataset& dataset, const PipelineConfig& config,
                          const Protocol& protocol, unsigned jobs) {
  std::map<std::string, std::vector<RawSequence>> by_group;
  for (const auto& s : dataset.sequences) by_group[s.group].push_back(s);
  GroupedReport out;
  for (auto& [name, seqs] : by_group) {
    Dataset slice;
    slice.format = dataset.format;
    slice.layout = dataset.layout;
    slice.class_names = dataset.class_names;
    slice.sequences = std::move(seqs);
    EvalReport r = run_protocol(slice, config, protocol, jobs);
    r.group = name;
    out.macro_precision += r.metrics.macro_precision;
    out.macro_recall += r.metrics.macro_recall;
    out.accuracy += r.accuracy;
    out.groups.push_back(std::move(r));
  }
  if (!out.groups.empty()) {
    const auto n = static_cast<double>(out.groups.size());
    out.macro_precision /= n;
    out.macro_recall /= n;
    out.accuracy /= n;
  }
  return out;
}

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j;
  j["schema"] = "skelwarp.report";
  j["schema_version"] = kReportSchemaVersion;
  if (!r.group.empty()) j["group"] = r.group;
  j["protocol"] = {{"kind", std::string(to_string(r.protocol.kind))},
                   {"folds", r.protocol.folds},
                   {"train_fraction", r.protocol.train_fraction},
                   {"repeats", r.protocol.repeats},
                   {"seed", r.protocol.seed}};
  j["classes"] = r.class_names;
  j["confusion"] = r.confusion.counts;
  nlohmann::json per_class = nlohmann::json::array();
  for (std::size_t c = 0; c < r.metrics.per_class.size(); ++c) {
    const auto& s = r.metrics.per_class[c];
    per_class.push_back({{"class", r.class_names[c]},
                         {"precision", s.precision},
                         {"recall", s.recall},
                         {"precision_undefined", s.precision_undefined},
                         {"recall_undefined", s.recall_undefined}});
  }
  j["per_class"] = std::move(per_class);
  j["macro_precision"] = r.metrics.macro_precision;
  j["macro_recall"] = r.metrics.macro_recall;
  j["pooled_accuracy"] = r.metrics.accuracy;
  j["accuracy"] = r.accuracy;
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : r.folds) {
    folds.push_back({{"repeat", f.repeat},
                     {"fold", f.fold},
                     {"test_subjects", f.test_subjects},
                     {"train_size", f.train_size},
                     {"test_size", f.test_size},
                     {"accuracy", f.accuracy},
                     {"wavelet", to_string(f.wavelet)},
                     {"confusion", f.confusion.counts},
                     {"warnings", f.warnings}});
  }
  j["folds"] = std::move(folds);
  j["config"] = r.config;
  return j;
}

nlohmann::json to_json(const GroupedReport& r) {
  nlohmann::json j;
  j["schema"] = "skelwarp.grouped_report";
  j["schema_version"] = kReportSchemaVersion;
  j["macro_precision"] = r.macro_precision;
  j["macro_recall"] = r.macro_recall;
  j["accuracy"] = r.accuracy;
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : r.groups) groups.push_back(to_json(g));
  j["groups"] = std::move(groups);
  return j;
}

namespace {

std::string pct(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << 100.0 * v << '%';
  return os.str();
}

}  // namespace

std::string to_text(const EvalReport& r) {
  std::ostringstream os;
  std::size_t width = 5;
  for (const auto& n : r.class_names) width = std::max(width, n.size());
  os << "protocol " << to_string(r.protocol.kind) << ", " << r.folds.size() << " folds";
  if (!r.group.empty()) os << ", group " << r.group;
  os << '\n';
  os << std::left << std::setw(static_cast<int>(width)) << "class" << std::right << std::setw(11)
     << "precision" << std::setw(9) << "recall" << '\n';
  for (std::size_t c = 0; c < r.class_names.size(); ++c) {
    const auto& s = r.metrics.per_class[c];
    os << std::left << std::setw(static_cast<int>(width)) << r.class_names[c] << std::right
       << std::setw(11) << (pct(s.precision) + (s.precision_undefined ? "*" : ""))
       << std::setw(9) << (pct(s.recall) + (s.recall_undefined ? "*" : "")) << '\n';
  }
  os << std::left << std::setw(static_cast<int>(width)) << "macro" << std::right << std::setw(11)
     << pct(r.metrics.macro_precision) << std::setw(9) << pct(r.metrics.macro_recall) << '\n';
  os << "accuracy (mean over folds) " << pct(r.accuracy) << '\n';
  os << "confusion (rows true, columns predicted)\n";
  for (const auto& row : r.confusion.counts) {
    for (long long v : row) os << std::setw(6) << v;
    os << '\n';
  }
  return os.str();
}

std::string to_text(const GroupedReport& r) {
  std::ostringstream os;
  for (const auto& g : r.groups) os << to_text(g) << '\n';
  os << "average over " << r.groups.size() << " groups: precision " << pct(r.macro_precision)
     << ", recall " << pct(r.macro_recall) << ", accuracy " << pct(r.accuracy) << '\n';
  return os.str();
}

}  // namespace skelwarp
