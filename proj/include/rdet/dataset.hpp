#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rdet/schema.hpp"
#include "rdet/types.hpp"

namespace rdet {

/// In-memory tabular dataset. `features` holds the numeric columns in schema
/// order, one row per sample; identifier columns are kept as raw text so a
/// loaded CSV re-serializes losslessly. Immutable by convention once built;
/// safe to share across threads.
struct Dataset {
  FeatureSchema schema;
  Matrix features;    // n x d
  IntVector labels;   // n entries in {0,1}; empty when the CSV had no labels
  // One vector per identifier column (schema order), each of length n.
  std::vector<std::vector<std::string>> id_cells;

  Eigen::Index size() const { return features.rows(); }
  bool has_labels() const { return labels.size() == features.rows() && features.rows() > 0; }

  /// First identifier cell of a row, or "" when the schema has none.
  std::string id_of(Eigen::Index row) const;
};

struct SplitSpec {
  double train_fraction = 0.8;
  bool stratified = true;
  std::uint64_t seed = 0;
};

struct LoadOptions {
  // When false, a CSV without the label column loads as an unlabeled dataset
  // (used by `predict` and `scan`).
  bool require_label = true;
};

Dataset load_csv(const std::filesystem::path& path, const FeatureSchema& schema,
                 const LoadOptions& opts = {});
Dataset parse_csv(std::string_view text, const FeatureSchema& schema,
                  const LoadOptions& opts = {});

std::string to_csv(const Dataset& ds);
void write_csv(const Dataset& ds, const std::filesystem::path& path);

struct ColumnReport {
  std::string name;
  long long missing = 0;  // NaN/inf entries
  bool constant = false;
};

struct ValidationReport {
  long long rows = 0;
  int total_columns = 0;
  int feature_columns = 0;
  std::vector<ColumnReport> columns;
  long long missing_total = 0;
  long long class0 = 0;  // malware
  long long class1 = 0;  // legitimate
  bool has_labels = false;
  bool single_class = false;

  /// Count of conditions a clean dataset must not have.
  long long defects() const { return missing_total + (single_class ? 1 : 0); }
  std::string to_kv() const;
};

ValidationReport validate(const Dataset& ds);

/// Seeded, optionally stratified train/test partition. Train size is
/// floor(fraction * n + 0.5) overall (per class when stratified, so the
/// total can differ by at most one). Row order within each side follows the
/// original dataset order.
std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, const SplitSpec& spec);

/// (count of label 0, count of label 1).
std::pair<long long, long long> class_balance(const Dataset& ds);

/// Rows selected by index (duplicates allowed), preserving the given order.
Dataset take(const Dataset& ds, std::span<const int> rows);

/// Synthetic dataset following the observed legitimate/malware header
/// patterns: legitimate rows have non-zero MajorImageVersion, ExportSize,
/// DebugSize and ResourceSize with IatRVA = 4096; malware rows zero those
/// columns and use IatRVA of 0 or a very large value. Remaining columns get
/// bounded random noise. 2*n_per_class rows, labels alternating 0,1.
Dataset synth_generate(int n_per_class, std::uint64_t seed);

}  // namespace rdet
