// rdet: ransomware detection toolkit over PE-header features.
//
// Subcommands: ingest, stats, train, evaluate, predict, scan, synth.
// Exit codes: 0 success, 1 operational failure, 2 usage error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rdet/dataset.hpp"
#include "rdet/errors.hpp"
#include "rdet/hash.hpp"
#include "rdet/metrics.hpp"
#include "rdet/model_io.hpp"
#include "rdet/pe.hpp"
#include "rdet/pipeline.hpp"
#include "rdet/svg.hpp"
#include "rdet/textio.hpp"

namespace fs = std::filesystem;
using namespace rdet;

namespace {

FeatureSchema schema_from(const std::optional<std::string>& path) {
  return path ? FeatureSchema::from_file(*path) : FeatureSchema::kaggle_default();
}

int run_ingest(const std::string& data, const std::optional<std::string>& schema_path,
               const std::optional<std::string>& out) {
  const FeatureSchema schema = schema_from(schema_path);
  const std::string bytes = read_file(data);
  const Dataset ds = parse_csv(bytes, schema);
  ValidationReport rep = validate(ds);
  std::string kv = rep.to_kv();
  kv += "validation.dataset_sha256=" + sha256_hex(canonicalize_csv_bytes(bytes)) + "\n";
  std::cout << kv;
  if (out) write_file(*out, kv);
  return 0;
}

int run_stats(const std::string& data, const std::optional<std::string>& schema_path,
              const std::optional<std::string>& out, const std::string& format) {
  const FeatureSchema schema = schema_from(schema_path);
  const Dataset ds = load_csv(data, schema);
  const CorrelationMatrix corr = pearson_corr_matrix(ds.features);
  const auto [c0, c1] = class_balance(ds);

  KvWriter kv;
  kv.add("stats.rows", static_cast<long long>(ds.size()));
  kv.add("stats.class0", c0);
  kv.add("stats.class1", c1);
  std::string undefined;
  for (std::size_t j = 0; j < corr.column_defined.size(); ++j) {
    if (corr.column_defined[j]) continue;
    if (!undefined.empty()) undefined.push_back(',');
    undefined += schema.feature_names()[j];
  }
  kv.add("stats.constant_columns", undefined.empty() ? "-" : undefined);

  const std::string csv = corr.to_csv(schema.feature_names());
  const std::string svg =
      heatmap_svg(corr.r, schema.feature_names(), "Feature correlation");
  if (out) {
    fs::create_directories(*out);
    write_file(fs::path(*out) / "corr.csv", csv);
    write_file(fs::path(*out) / "corr.svg", svg);
  }
  if (format == "csv")
    std::cout << csv;
  else if (format == "svg")
    std::cout << svg;
  else
    std::cout << kv.str();
  return 0;
}

void apply_overrides(ExperimentConfig& cfg, const std::optional<std::string>& data,
                     const std::optional<std::string>& out,
                     const std::optional<std::uint64_t>& seed,
                     const std::optional<double>& split,
                     const std::optional<int>& positive, bool stamp) {
  if (data) cfg.data = *data;
  if (out) cfg.out = *out;
  if (seed) cfg.seed = *seed;
  if (split) cfg.train_fraction = *split;
  if (positive) cfg.positive = *positive;
  if (stamp) {
    char buf[32];
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    cfg.trained_at = buf;
  }
  cfg.validate();
}

int run_train(const ExperimentConfig& cfg, int repeats) {
  if (repeats > 1) {
    const std::vector<MetricsReport> runs = run_repeated(cfg, repeats);
    KvWriter kv;
    double mean = 0.0, sq = 0.0;
    for (std::size_t k = 0; k < runs.size(); ++k) {
      kv.add("repeat." + std::to_string(k) + ".seed",
             static_cast<long long>(cfg.seed + k));
      kv.add("repeat." + std::to_string(k) + ".accuracy", runs[k].accuracy);
      mean += runs[k].accuracy;
    }
    mean /= static_cast<double>(runs.size());
    for (const MetricsReport& r : runs) sq += (r.accuracy - mean) * (r.accuracy - mean);
    kv.add("repeat.mean_accuracy", mean);
    kv.add("repeat.stddev_accuracy",
           runs.size() > 1 ? std::sqrt(sq / static_cast<double>(runs.size() - 1)) : 0.0);
    std::cout << kv.str();
    return 0;
  }

  const ExperimentResult res = run_experiment(cfg);
  std::cerr << res.report.to_text();
  KvWriter kv;
  kv.add("train.model", res.model_path.string());
  kv.add("train.kind", cfg.model_kind);
  kv.add("train.seconds", res.train_seconds);
  kv.add("train.rows", res.train_rows);
  kv.add("test.rows", res.test_rows);
  std::cout << kv.str() << res.report.to_kv();
  return 0;
}

int run_evaluate(const std::string& model_path, const std::string& data,
                 const std::optional<std::string>& schema_path,
                 const std::optional<std::string>& out, int positive,
                 const std::string& format) {
  const SavedModel model = load_model_file(model_path);
  const FeatureSchema schema = schema_from(schema_path);
  if (schema.feature_names() != model.feature_names)
    throw FeatureLengthMismatch(
        "schema feature columns do not match the model's training schema");
  const Dataset ds = load_csv(data, schema);
  if (!ds.has_labels()) throw EmptyClass("evaluate needs a labeled dataset");

  const ScoredPredictions pred = score_dataset(model, ds, positive, schema);
  const std::vector<int> truth(ds.labels.data(), ds.labels.data() + ds.size());
  const MetricsReport report = make_report(truth, pred.labels, positive);
  const PrCurve pr = pr_curve(truth, pred.scores, positive);

  if (out)
    write_report_artifacts(*out, report, pr,
                           model.kind() + " on " + fs::path(data).filename().string());
  std::cerr << report.to_text();
  if (format == "csv")
    std::cout << pr.to_csv();
  else if (format == "svg")
    std::cout << pr_curve_svg(pr, "Precision-recall");
  else
    std::cout << report.to_kv();
  return 0;
}

int run_predict(const std::string& model_path, const std::string& data,
                const std::optional<std::string>& schema_path,
                const std::optional<std::string>& out, int positive) {
  const SavedModel model = load_model_file(model_path);
  const FeatureSchema schema = schema_from(schema_path);
  if (schema.feature_names() != model.feature_names)
    throw FeatureLengthMismatch(
        "schema feature columns do not match the model's training schema");
  LoadOptions opts;
  opts.require_label = false;
  const Dataset ds = load_csv(data, schema, opts);
  const ScoredPredictions pred = score_dataset(model, ds, positive, schema);

  std::string csv = "id,predicted_label,positive_score\n";
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    std::string id = ds.id_of(i);
    csv += (id.empty() ? "row" + std::to_string(i) : id) + "," +
           std::to_string(pred.labels[static_cast<std::size_t>(i)]) + "," +
           fmt_double(pred.scores[static_cast<std::size_t>(i)]) + "\n";
  }
  std::cout << csv;
  if (out) write_file(*out, csv);
  return 0;
}

int run_scan(const std::vector<std::string>& paths,
             const std::optional<std::string>& model_path,
             const std::optional<std::string>& schema_path,
             const std::optional<std::string>& out, int positive) {
  SavedModel model;
  const FeatureSchema schema = schema_from(schema_path);
  if (model_path) {
    model = load_model_file(*model_path);
    if (schema.feature_names() != model.feature_names)
      throw FeatureLengthMismatch(
          "schema feature columns do not match the model's training schema");
  } else {
    model.model = HeuristicModel{};
    model.feature_names = schema.feature_names();
  }

  // Deterministic output: expand directories, then order by path.
  std::vector<fs::path> files;
  for (const std::string& p : paths) {
    const fs::path path(p);
    if (fs::is_directory(path)) {
      for (const auto& entry : fs::recursive_directory_iterator(path))
        if (entry.is_regular_file()) files.push_back(entry.path());
    } else {
      files.push_back(path);
    }
  }
  std::sort(files.begin(), files.end());

  Dataset rows;
  rows.schema = schema;
  int id_columns = 0;
  for (const Column& c : schema.columns())
    if (c.kind == ColumnKind::Identifier) ++id_columns;
  std::vector<Eigen::RowVectorXd> feature_rows;
  std::vector<int> verdicts;
  std::vector<std::vector<std::string>> ids(static_cast<std::size_t>(id_columns));

  for (const fs::path& file : files) {
    std::string bytes;
    try {
      bytes = read_file(file);
      const PeHeaderSummary summary =
          parse_pe({reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()});
      const Vector features = to_feature_vector(summary, schema);
      const int label = predict_label(model, features, schema);
      const double score = positive_score(model, features, positive, schema);
      std::cout << file.string() << "\t" << (label == kMalwareLabel ? "malware" : "legitimate")
                << "\t" << fmt_double(score) << "\n";
      feature_rows.push_back(features.transpose());
      verdicts.push_back(label);
      if (id_columns > 0) ids[0].push_back(file.string());
      if (id_columns > 1) ids[1].push_back(md5_hex(bytes));
      for (int c = 2; c < id_columns; ++c) ids[static_cast<std::size_t>(c)].emplace_back();
    } catch (const PeError& e) {
      // One unparsable file must not abort a directory scan.
      std::cout << file.string() << "\terror\t" << e.what() << "\n";
    } catch (const Error& e) {
      std::cout << file.string() << "\terror\t" << e.what() << "\n";
    }
  }

  if (out) {
    rows.features.resize(static_cast<Eigen::Index>(feature_rows.size()),
                         schema.feature_count());
    rows.labels.resize(static_cast<Eigen::Index>(verdicts.size()));
    for (std::size_t i = 0; i < feature_rows.size(); ++i) {
      rows.features.row(static_cast<Eigen::Index>(i)) = feature_rows[i];
      rows.labels[static_cast<Eigen::Index>(i)] = verdicts[i];
    }
    rows.id_cells = std::move(ids);
    write_csv(rows, *out);
  }
  return 0;
}

int run_synth(int n_per_class, std::uint64_t seed, const std::string& out) {
  const Dataset ds = synth_generate(n_per_class, seed);
  write_csv(ds, out);
  KvWriter kv;
  kv.add("synth.rows", static_cast<long long>(ds.size()));
  kv.add("synth.out", out);
  kv.add("synth.seed", static_cast<long long>(seed));
  std::cout << kv.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rdet: ransomware detection over PE-header features"};
  app.require_subcommand(1);

  std::optional<std::string> schema_path, out, data_opt, model_opt;
  std::string data, model_path, config_path;
  std::optional<std::uint64_t> seed_opt;
  std::optional<double> split_opt;
  std::optional<int> positive_opt;
  std::uint64_t seed = 0;
  int positive = kMalwareLabel;
  int n_per_class = 100;
  int repeats = 1;
  bool stamp = false;
  std::string format = "text";
  std::vector<std::string> scan_paths;

  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "stdout payload")
        ->check(CLI::IsMember({"text", "csv", "svg"}));
  };
  auto add_schema = [&](CLI::App* cmd) {
    cmd->add_option("--schema", schema_path, "schema config file")
        ->check(CLI::ExistingFile);
  };
  auto add_positive = [&](CLI::App* cmd, bool as_override) {
    if (as_override)
      cmd->add_option("--positive-class", positive_opt, "positive class label (0=malware)")
          ->check(CLI::Range(0, 1));
    else
      cmd->add_option("--positive-class", positive, "positive class label (0=malware)")
          ->check(CLI::Range(0, 1));
  };

  CLI::App* ingest = app.add_subcommand("ingest", "load and validate a dataset CSV");
  ingest->add_option("--data", data, "dataset CSV")->required()->check(CLI::ExistingFile);
  add_schema(ingest);
  ingest->add_option("--out", out, "also write the validation report here");

  CLI::App* stats = app.add_subcommand("stats", "class balance and feature correlations");
  stats->add_option("--data", data, "dataset CSV")->required()->check(CLI::ExistingFile);
  add_schema(stats);
  stats->add_option("--out", out, "directory for corr.csv / corr.svg");
  add_format(stats);

  CLI::App* train = app.add_subcommand("train", "run a training experiment from a config");
  train->add_option("--config", config_path, "experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--data", data_opt, "override the config's dataset path")
      ->check(CLI::ExistingFile);
  train->add_option("--out", out, "override the config's output directory");
  train->add_option("--seed", seed_opt, "override the config's seed");
  train->add_option("--split", split_opt, "override the train fraction (0,1)");
  add_positive(train, true);
  train->add_flag("--stamp", stamp, "record the current UTC time in the model file");
  train->add_option("--repeats", repeats, "re-run with consecutive seeds, report variance")
      ->check(CLI::Range(1, 1000));

  CLI::App* evaluate = app.add_subcommand("evaluate", "score a model against labeled data");
  evaluate->add_option("--model", model_path, "model file")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--data", data, "labeled CSV")->required()->check(CLI::ExistingFile);
  add_schema(evaluate);
  evaluate->add_option("--out", out, "directory for report/pr/confusion artifacts");
  add_positive(evaluate, false);
  add_format(evaluate);

  CLI::App* predict = app.add_subcommand("predict", "per-row labels and scores");
  predict->add_option("--model", model_path, "model file")
      ->required()
      ->check(CLI::ExistingFile);
  predict->add_option("--data", data, "CSV (label column optional)")
      ->required()
      ->check(CLI::ExistingFile);
  add_schema(predict);
  predict->add_option("--out", out, "also write the prediction CSV here");
  add_positive(predict, false);

  CLI::App* scan = app.add_subcommand("scan", "extract features from PE binaries and classify");
  scan->add_option("paths", scan_paths, "files or directories of binaries")
      ->required()
      ->check(CLI::ExistingPath);
  scan->add_option("--model", model_opt, "model file (default: rule-based heuristic)")
      ->check(CLI::ExistingFile);
  add_schema(scan);
  scan->add_option("--out", out, "write scanned feature rows as CSV");
  add_positive(scan, false);

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset CSV");
  synth->add_option("--n", n_per_class, "rows per class")->check(CLI::PositiveNumber);
  synth->add_option("--seed", seed, "generator seed");
  synth->add_option("--out", out, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*ingest) return run_ingest(data, schema_path, out);
    if (*stats) return run_stats(data, schema_path, out, format);
    if (*train) {
      ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
      apply_overrides(cfg, data_opt, out, seed_opt, split_opt, positive_opt, stamp);
      return run_train(cfg, repeats);
    }
    if (*evaluate) return run_evaluate(model_path, data, schema_path, out, positive, format);
    if (*predict) return run_predict(model_path, data, schema_path, out, positive);
    if (*scan) return run_scan(scan_paths, model_opt, schema_path, out, positive);
    if (*synth) return run_synth(n_per_class, seed, *out);
  } catch (const ConfigInvalid& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
