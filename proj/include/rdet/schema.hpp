#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rdet {

enum class ColumnKind { Numeric, Identifier, Label };

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
  // Alternate header spellings accepted when loading a CSV. The public
  // ransomware dataset spells the IAT column "IatVRA"; the canonical schema
  // name is "IatRVA".
  std::vector<std::string> aliases;
};

/// Ordered column layout of the tabular dataset. Exactly one label column;
/// identifier columns (file name, hash) are never model features.
class FeatureSchema {
 public:
  FeatureSchema() = default;
  explicit FeatureSchema(std::vector<Column> columns);  // validates invariants

  const std::vector<Column>& columns() const { return columns_; }
  const Column& label() const { return columns_[static_cast<std::size_t>(label_index_)]; }
  const std::string& label_column() const { return label().name; }

  /// Names of numeric columns in schema order. These are the model features.
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  int feature_count() const { return static_cast<int>(feature_names_.size()); }
  int total_columns() const { return static_cast<int>(columns_.size()); }

  /// Index into the feature vector for a numeric column, matching the
  /// canonical name or any alias. Empty if the column is unknown or not
  /// numeric.
  std::optional<int> feature_index(std::string_view name) const;

  /// Schema column (any kind) matching name or alias; -1 if unknown.
  int column_index(std::string_view name) const;

  /// Human note on what the label values mean.
  static constexpr const char* label_convention() { return "legitimate=1, malware=0"; }

  /// The 18-column layout of the public Kaggle ransomware dataset.
  static FeatureSchema kaggle_default();

  /// Parses a schema config file. One column per line:
  ///   <name> <numeric|identifier|label> [alias <other-name>]...
  /// '#' starts a comment; blank lines are ignored.
  static FeatureSchema from_file(const std::filesystem::path& path);
  static FeatureSchema from_text(std::string_view text);

 private:
  std::vector<Column> columns_;
  std::vector<std::string> feature_names_;
  int label_index_ = -1;
};

}  // namespace rdet
