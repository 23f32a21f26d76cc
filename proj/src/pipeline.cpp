#include "rdet/pipeline.hpp"

#include <chrono>

#include "rdet/errors.hpp"
#include "rdet/hash.hpp"
#include "rdet/svg.hpp"
#include "rdet/textio.hpp"

namespace rdet {
namespace {

bool parse_bool(std::string_view v, std::string_view key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigInvalid("config: " + std::string(key) + " expects true/false, got '" +
                      std::string(v) + "'");
}

double parse_real_cfg(std::string_view v, std::string_view key) {
  try {
    return parse_double(v);
  } catch (const UnparsableValue&) {
    throw ConfigInvalid("config: " + std::string(key) + " expects a number, got '" +
                        std::string(v) + "'");
  }
}

long long parse_int_cfg(std::string_view v, std::string_view key) {
  try {
    return parse_int(v);
  } catch (const UnparsableValue&) {
    throw ConfigInvalid("config: " + std::string(key) + " expects an integer, got '" +
                        std::string(v) + "'");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::filesystem::path& p) {
  return p.is_absolute() || base.empty() ? p : base / p;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_text(std::string_view text,
                                             const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  bool have_data = false;
  for (std::string_view raw : split_lines(text)) {
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigInvalid("config: expected 'key = value', got: " + std::string(line));
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigInvalid("config: empty value for key " + key);

    if (key == "data") {
      cfg.data = resolve(base_dir, std::string(value));
      have_data = true;
    } else if (key == "schema") {
      cfg.schema = resolve(base_dir, std::string(value));
    } else if (key == "model") {
      cfg.model_kind = std::string(value);
    } else if (key == "out") {
      cfg.out = resolve(base_dir, std::string(value));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int_cfg(value, key));
    } else if (key == "positive") {
      cfg.positive = static_cast<int>(parse_int_cfg(value, key));
    } else if (key == "stamp") {
      cfg.trained_at = std::string(value);
    } else if (key == "split.fraction") {
      cfg.train_fraction = parse_real_cfg(value, key);
    } else if (key == "split.stratified") {
      cfg.stratified = parse_bool(value, key);
    } else if (key == "gbdt.rounds") {
      cfg.gbdt.n_rounds = static_cast<int>(parse_int_cfg(value, key));
    } else if (key == "gbdt.learning_rate") {
      cfg.gbdt.learning_rate = parse_real_cfg(value, key);
    } else if (key == "gbdt.lambda") {
      cfg.gbdt.lambda = parse_real_cfg(value, key);
    } else if (key == "gbdt.gamma") {
      cfg.gbdt.gamma = parse_real_cfg(value, key);
    } else if (key == "gbdt.base_score") {
      cfg.gbdt.base_score = parse_real_cfg(value, key);
    } else if (key == "gbdt.max_depth") {
      cfg.gbdt.grow.max_depth = static_cast<int>(parse_int_cfg(value, key));
    } else if (key == "gbdt.min_leaf") {
      cfg.gbdt.grow.min_leaf = static_cast<int>(parse_int_cfg(value, key));
    } else if (key == "gbdt.min_gain") {
      cfg.gbdt.grow.min_gain = parse_real_cfg(value, key);
    } else if (key == "gbdt.feature_subsample") {
      cfg.gbdt.grow.feature_subsample = parse_real_cfg(value, key);
    } else if (key == "forest.trees") {
      cfg.forest.n_trees = static_cast<int>(parse_int_cfg(value, key));
    } else if (key == "forest.bootstrap") {
      cfg.forest.bootstrap = parse_bool(value, key);
    } else if (key == "forest.feature_subsample") {
      if (value == "sqrt")
        cfg.forest.feature_subsample.reset();
      else
        cfg.forest.feature_subsample = parse_real_cfg(value, key);
    } else if (key == "forest.max_depth") {
      cfg.forest.grow.max_depth = static_cast<int>(parse_int_cfg(value, key));
    } else if (key == "forest.min_leaf") {
      cfg.forest.grow.min_leaf = static_cast<int>(parse_int_cfg(value, key));
    } else if (key == "forest.min_gain") {
      cfg.forest.grow.min_gain = parse_real_cfg(value, key);
    } else if (key == "heuristic.iat_threshold") {
      cfg.heuristic.iat_large_threshold = parse_real_cfg(value, key);
    } else {
      throw ConfigInvalid("config: unknown key '" + key + "'");
    }
  }
  if (!have_data) throw ConfigInvalid("config: missing required key 'data'");
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
  return from_text(read_file(path), path.parent_path());
}

void ExperimentConfig::validate() const {
  if (model_kind != "gbdt" && model_kind != "forest" && model_kind != "heuristic")
    throw ConfigInvalid("config: model must be gbdt, forest or heuristic");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigInvalid("config: split.fraction must lie in (0,1)");
  if (positive != 0 && positive != 1)
    throw ConfigInvalid("config: positive must be 0 or 1");
}

FeatureSchema ExperimentConfig::load_schema() const {
  return schema ? FeatureSchema::from_file(*schema) : FeatureSchema::kaggle_default();
}

ScoredPredictions score_dataset(const SavedModel& model, const Dataset& ds, int positive,
                                const FeatureSchema& schema) {
  ScoredPredictions out;
  out.labels.reserve(static_cast<std::size_t>(ds.size()));
  out.scores.reserve(static_cast<std::size_t>(ds.size()));
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    const auto row = ds.features.row(i).transpose();
    out.labels.push_back(predict_label(model, row, schema));
    out.scores.push_back(positive_score(model, row, positive, schema));
  }
  return out;
}

void write_report_artifacts(const std::filesystem::path& out_dir,
                            const MetricsReport& report, const PrCurve& pr,
                            const std::string& title) {
  std::filesystem::create_directories(out_dir);
  write_file(out_dir / "report.txt", report.to_text());
  write_file(out_dir / "report.kv", report.to_kv());
  write_file(out_dir / "pr.csv", pr.to_csv());
  write_file(out_dir / "pr.svg", pr_curve_svg(pr, "Precision-recall: " + title));
  const ConfusionMatrix& cm = report.cm;
  std::string cm_csv = ",pred_" + std::to_string(cm.positive) + ",pred_" +
                       std::to_string(1 - cm.positive) + "\n";
  cm_csv += "actual_" + std::to_string(cm.positive) + "," + std::to_string(cm.tp) + "," +
            std::to_string(cm.fn) + "\n";
  cm_csv += "actual_" + std::to_string(1 - cm.positive) + "," + std::to_string(cm.fp) +
            "," + std::to_string(cm.tn) + "\n";
  write_file(out_dir / "confusion.csv", cm_csv);
  write_file(out_dir / "confusion.svg", confusion_svg(cm, "Confusion: " + title));
}

namespace {

ExperimentResult run_once(const ExperimentConfig& cfg, bool write_artifacts) {
  cfg.validate();
  const FeatureSchema schema = cfg.load_schema();
  const std::string csv_bytes = read_file(cfg.data);
  const Dataset ds = parse_csv(csv_bytes, schema);

  ExperimentResult res;
  res.validation = validate(ds);

  SplitSpec split;
  split.train_fraction = cfg.train_fraction;
  split.stratified = cfg.stratified;
  split.seed = cfg.seed;
  auto [train_ds, test_ds] = stratified_split(ds, split);
  res.train_rows = train_ds.size();
  res.test_rows = test_ds.size();

  SavedModel saved;
  saved.feature_names = schema.feature_names();
  saved.dataset_sha256 = sha256_hex(canonicalize_csv_bytes(csv_bytes));
  if (cfg.trained_at) saved.trained_at = *cfg.trained_at;

  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.model_kind == "gbdt") {
    GbdtParams p = cfg.gbdt;
    p.seed = cfg.seed;
    saved.model = train(train_ds, p);
  } else if (cfg.model_kind == "forest") {
    ForestParams p = cfg.forest;
    p.seed = cfg.seed;
    p.positive_label = cfg.positive;
    saved.model = train(train_ds, p);
  } else {
    saved.model = HeuristicModel{cfg.heuristic};
  }
  res.train_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const ScoredPredictions pred = score_dataset(saved, test_ds, cfg.positive, schema);
  std::vector<int> truth(test_ds.labels.data(), test_ds.labels.data() + test_ds.size());
  res.report = make_report(truth, pred.labels, cfg.positive);
  res.pr = pr_curve(truth, pred.scores, cfg.positive);

  saved.metric_summary = {{"test_accuracy", res.report.accuracy},
                          {"test_precision", res.report.precision.value},
                          {"test_recall", res.report.recall.value},
                          {"test_f1", res.report.f1}};
  res.model = std::move(saved);

  if (write_artifacts) {
    std::filesystem::create_directories(cfg.out);
    res.model_path = cfg.out / "model.rdet";
    save_model_file(res.model, res.model_path);
    write_file(cfg.out / "validation.kv", res.validation.to_kv());
    write_report_artifacts(cfg.out, res.report, res.pr,
                           cfg.model_kind + " on " + cfg.data.filename().string());
  }
  return res;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) { return run_once(cfg, true); }

std::vector<MetricsReport> run_repeated(const ExperimentConfig& cfg, int repeats) {
  if (repeats < 1) throw ConfigInvalid("repeats must be >= 1");
  std::vector<MetricsReport> out;
  out.reserve(static_cast<std::size_t>(repeats));
  for (int k = 0; k < repeats; ++k) {
    ExperimentConfig c = cfg;
    c.seed = cfg.seed + static_cast<std::uint64_t>(k);
    out.push_back(run_once(c, false).report);
  }
  return out;
}

}  // namespace rdet
