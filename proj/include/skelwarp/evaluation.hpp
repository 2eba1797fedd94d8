#pragma once

// Cross-validation protocols, confusion-matrix metrics and reports.

#include <json.hpp>
#include <span>
#include <string>

#include "skelwarp/config.hpp"
#include "skelwarp/dataset.hpp"

namespace skelwarp {

inline constexpr int kReportSchemaVersion = 1;

struct Protocol {
  ProtocolKind kind = ProtocolKind::LOSubO;
  int folds = 2;
  double train_fraction = 0.7;
  int repeats = 1;
  std::uint64_t seed = 1;

  static Protocol from_config(const PipelineConfig& config);
};

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Folds for one repetition. Subject-based kinds never split a subject across
/// train and test. Throws InsufficientSubjects when the data cannot support
/// the protocol.
std::vector<Fold> make_folds(std::span<const RawSequence> data, const Protocol& protocol,
                             int repeat);

/// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
  std::vector<std::vector<long long>> counts;

  explicit ConfusionMatrix(std::size_t classes = 0)
      : counts(classes, std::vector<long long>(classes, 0)) {}

  std::size_t size() const noexcept { return counts.size(); }
  void add(std::size_t truth, std::size_t predicted) { ++counts.at(truth).at(predicted); }
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  long long total() const;
};

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  /// Set when the denominator was zero (the score is reported as 0).
  bool precision_undefined = false;
  bool recall_undefined = false;
};

struct Metrics {
  std::vector<ClassScores> per_class;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double accuracy = 0.0;
};

/// precision_c = diag / column sum, recall_c = diag / row sum. Throws
/// NonSquareMatrix for ragged or non-square input.
Metrics metrics(const std::vector<std::vector<long long>>& matrix);

struct FoldResult {
  int repeat = 0;
  int fold = 0;
  std::vector<int> test_subjects;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  double accuracy = 0.0;
  ConfusionMatrix confusion;
  WaveletSpec wavelet;
  std::vector<std::uint64_t> test_uids;
  /// Every uid the fold's model was built from (templates, tuning, forest).
  std::vector<std::uint64_t> model_uids;
  std::vector<std::string> warnings;
};

struct EvalReport {
  std::string group;  // empty for the whole dataset
  Protocol protocol;
  std::vector<std::string> class_names;
  /// Summed over every fold of every repetition.
  ConfusionMatrix confusion;
  Metrics metrics;
  /// Mean of fold accuracies (equal fold weights).
  double accuracy = 0.0;
  std::vector<FoldResult> folds;
  nlohmann::json config;
};

EvalReport run_protocol(const Dataset& dataset, const PipelineConfig& config,
                        const Protocol& protocol, unsigned jobs = 1);

/// One protocol run per dataset group (e.g. recording environment), plus the
/// unweighted average of the per-group macro precision, recall and accuracy.
struct GroupedReport {
  std::vector<EvalReport> groups;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double accuracy = 0.0;
};

GroupedReport run_grouped(const Dataset& dataset, const PipelineConfig& config,
                          const Protocol& protocol, unsigned jobs = 1);

nlohmann::json to_json(const EvalReport& report);
nlohmann::json to_json(const GroupedReport& report);
std::string to_text(const EvalReport& report);
std::string to_text(const GroupedReport& report);

}  // namespace skelwarp
