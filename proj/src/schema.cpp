#include "rdet/schema.hpp"

#include <unordered_set>

#include "rdet/errors.hpp"
#include "rdet/textio.hpp"

namespace rdet {

FeatureSchema::FeatureSchema(std::vector<Column> columns) : columns_(std::move(columns)) {
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const Column& c = columns_[i];
    if (c.name.empty()) throw ConfigInvalid("schema: empty column name");
    if (!seen.insert(c.name).second)
      throw ConfigInvalid("schema: duplicate column name '" + c.name + "'");
    for (const std::string& a : c.aliases)
      if (!seen.insert(a).second)
        throw ConfigInvalid("schema: alias collides with another column: '" + a + "'");
    if (c.kind == ColumnKind::Label) {
      if (label_index_ >= 0) throw ConfigInvalid("schema: more than one label column");
      label_index_ = static_cast<int>(i);
    }
    if (c.kind == ColumnKind::Numeric) feature_names_.push_back(c.name);
  }
  if (label_index_ < 0) throw ConfigInvalid("schema: no label column");
}

std::optional<int> FeatureSchema::feature_index(std::string_view name) const {
  int fi = 0;
  for (const Column& c : columns_) {
    if (c.kind != ColumnKind::Numeric) continue;
    if (c.name == name) return fi;
    for (const std::string& a : c.aliases)
      if (a == name) return fi;
    ++fi;
  }
  return std::nullopt;
}

int FeatureSchema::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return static_cast<int>(i);
    for (const std::string& a : columns_[i].aliases)
      if (a == name) return static_cast<int>(i);
  }
  return -1;
}

FeatureSchema FeatureSchema::kaggle_default() {
  std::vector<Column> cols{
      {"FileName", ColumnKind::Identifier, {}},
      {"md5Hash", ColumnKind::Identifier, {}},
      {"Machine", ColumnKind::Numeric, {}},
      {"DebugSize", ColumnKind::Numeric, {}},
      {"DebugRVA", ColumnKind::Numeric, {}},
      {"MajorImageVersion", ColumnKind::Numeric, {}},
      {"MajorOSVersion", ColumnKind::Numeric, {}},
      {"ExportRVA", ColumnKind::Numeric, {}},
      {"ExportSize", ColumnKind::Numeric, {}},
      // The upstream CSV header carries the "IatVRA" misspelling.
      {"IatRVA", ColumnKind::Numeric, {"IatVRA"}},
      {"MajorLinkerVersion", ColumnKind::Numeric, {}},
      {"MinorLinkerVersion", ColumnKind::Numeric, {}},
      {"NumberOfSections", ColumnKind::Numeric, {}},
      {"SizeOfStackReserve", ColumnKind::Numeric, {}},
      {"DllCharacteristics", ColumnKind::Numeric, {}},
      {"ResourceSize", ColumnKind::Numeric, {}},
      {"BitcoinAddresses", ColumnKind::Numeric, {}},
      {"Benign", ColumnKind::Label, {}},
  };
  return FeatureSchema(std::move(cols));
}

FeatureSchema FeatureSchema::from_text(std::string_view text) {
  std::vector<Column> cols;
  for (std::string_view raw : split_lines(text)) {
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string_view> tokens;
    for (std::string_view t : split(line, ' '))
      if (!trim(t).empty()) tokens.push_back(trim(t));
    if (tokens.size() < 2)
      throw ConfigInvalid("schema: expected '<name> <kind>' in line: " + std::string(line));
    Column col;
    col.name = std::string(tokens[0]);
    std::string_view kind = tokens[1];
    if (kind == "numeric")
      col.kind = ColumnKind::Numeric;
    else if (kind == "identifier")
      col.kind = ColumnKind::Identifier;
    else if (kind == "label")
      col.kind = ColumnKind::Label;
    else
      throw ConfigInvalid("schema: unknown column kind '" + std::string(kind) + "'");
    for (std::size_t i = 2; i < tokens.size(); i += 2) {
      if (tokens[i] != "alias" || i + 1 >= tokens.size())
        throw ConfigInvalid("schema: expected 'alias <name>' in line: " + std::string(line));
      col.aliases.emplace_back(tokens[i + 1]);
    }
    cols.push_back(std::move(col));
  }
  if (cols.empty()) throw ConfigInvalid("schema: no columns defined");
  return FeatureSchema(std::move(cols));
}

FeatureSchema FeatureSchema::from_file(const std::filesystem::path& path) {
  return from_text(read_file(path));
}

}  // namespace rdet
