#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "rdet/dataset.hpp"
#include "rdet/metrics.hpp"
#include "rdet/model_io.hpp"

namespace rdet {

/// One train/evaluate run: dataset, split protocol, model kind and
/// hyperparameters, output directory. The single seed drives both the split
/// and the learner.
struct ExperimentConfig {
  std::filesystem::path data;
  std::optional<std::filesystem::path> schema;  // default: built-in Kaggle layout
  std::string model_kind = "gbdt";              // gbdt | forest | heuristic
  std::filesystem::path out = "runs/exp";
  std::uint64_t seed = 0;
  double train_fraction = 0.8;
  bool stratified = true;
  int positive = kMalwareLabel;
  GbdtParams gbdt;
  ForestParams forest;
  HeuristicOptions heuristic;
  // Written into the model file verbatim when set; leaving it unset keeps
  // retraining byte-identical.
  std::optional<std::string> trained_at;

  /// Parses the declarative `key = value` config format. Unknown keys are
  /// rejected so typos surface immediately.
  static ExperimentConfig from_file(const std::filesystem::path& path);
  static ExperimentConfig from_text(std::string_view text,
                                    const std::filesystem::path& base_dir);

  FeatureSchema load_schema() const;
  void validate() const;
};

struct ExperimentResult {
  SavedModel model;
  std::filesystem::path model_path;
  ValidationReport validation;
  MetricsReport report;
  PrCurve pr;
  double train_seconds = 0.0;
  long long train_rows = 0;
  long long test_rows = 0;
};

/// load -> validate -> split -> train -> evaluate on the held-out test rows
/// -> persist model + report artifacts under cfg.out. Test rows never touch
/// training.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Variance reporting: re-runs with seeds cfg.seed, cfg.seed+1, ... and
/// returns each run's test metrics. No artifacts are written.
std::vector<MetricsReport> run_repeated(const ExperimentConfig& cfg, int repeats);

/// Scores + hard labels for every row of a dataset under a saved model.
struct ScoredPredictions {
  std::vector<int> labels;
  std::vector<double> scores;  // positive-class scores
};
ScoredPredictions score_dataset(const SavedModel& model, const Dataset& ds, int positive,
                                const FeatureSchema& schema);

/// Writes report.txt / report.kv / pr.csv / pr.svg / confusion.csv /
/// confusion.svg into out_dir.
void write_report_artifacts(const std::filesystem::path& out_dir,
                            const MetricsReport& report, const PrCurve& pr,
                            const std::string& title);

}  // namespace rdet
