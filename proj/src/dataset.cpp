#include "rdet/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "rdet/errors.hpp"
#include "rdet/rng.hpp"
#include "rdet/textio.hpp"

namespace rdet {

std::string Dataset::id_of(Eigen::Index row) const {
  if (id_cells.empty()) return {};
  return id_cells.front()[static_cast<std::size_t>(row)];
}

Dataset parse_csv(std::string_view text, const FeatureSchema& schema,
                  const LoadOptions& opts) {
  std::vector<std::string_view> lines = split_lines(text);
  if (lines.empty()) throw EmptyFile("CSV has no header row");

  std::vector<std::string_view> header = split(lines[0], ',');
  for (auto& h : header) h = trim(h);

  // Map each schema column to its CSV position; header order is free.
  const auto& cols = schema.columns();
  std::vector<int> csv_pos(cols.size(), -1);
  for (std::size_t h = 0; h < header.size(); ++h) {
    int ci = schema.column_index(header[h]);
    if (ci < 0) continue;  // columns outside the schema are ignored
    if (csv_pos[static_cast<std::size_t>(ci)] >= 0)
      throw DuplicateHeader("column appears twice in header: " + std::string(header[h]));
    csv_pos[static_cast<std::size_t>(ci)] = static_cast<int>(h);
  }
  bool label_present = true;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (csv_pos[c] >= 0) continue;
    if (cols[c].kind == ColumnKind::Label && !opts.require_label) {
      label_present = false;
      continue;
    }
    throw MissingColumn("CSV header lacks column: " + cols[c].name);
  }

  const Eigen::Index n = static_cast<Eigen::Index>(lines.size()) - 1;
  if (n == 0) throw EmptyFile("CSV has a header but no data rows");

  Dataset ds;
  ds.schema = schema;
  ds.features.resize(n, schema.feature_count());
  if (label_present) ds.labels.resize(n);
  for (const Column& c : cols)
    if (c.kind == ColumnKind::Identifier)
      ds.id_cells.emplace_back(static_cast<std::size_t>(n));

  for (Eigen::Index r = 0; r < n; ++r) {
    // Line 1 is the header, so data row r sits on file line r+2.
    const long long file_line = static_cast<long long>(r) + 2;
    std::vector<std::string_view> cells = split(lines[static_cast<std::size_t>(r) + 1], ',');
    int fi = 0;
    int idi = 0;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (csv_pos[c] < 0) continue;  // only possible for an optional label
      if (static_cast<std::size_t>(csv_pos[c]) >= cells.size())
        throw UnparsableValue("line " + std::to_string(file_line) + ": too few cells");
      std::string_view cell = trim(cells[static_cast<std::size_t>(csv_pos[c])]);
      switch (cols[c].kind) {
        case ColumnKind::Numeric:
          try {
            ds.features(r, fi) = parse_double(cell);
          } catch (const UnparsableValue&) {
            throw UnparsableValue("line " + std::to_string(file_line) + ", column " +
                                  cols[c].name + ": bad numeric value '" +
                                  std::string(cell) + "'");
          }
          break;
        case ColumnKind::Identifier:
          ds.id_cells[static_cast<std::size_t>(idi)][static_cast<std::size_t>(r)] =
              std::string(cell);
          break;
        case ColumnKind::Label: {
          double v;
          try {
            v = parse_double(cell);
          } catch (const UnparsableValue&) {
            throw UnparsableValue("line " + std::to_string(file_line) + ", column " +
                                  cols[c].name + ": bad label '" + std::string(cell) + "'");
          }
          if (v != 0.0 && v != 1.0)
            throw UnparsableValue("line " + std::to_string(file_line) + ", column " +
                                  cols[c].name + ": label must be 0 or 1, got '" +
                                  std::string(cell) + "'");
          ds.labels[r] = static_cast<int>(v);
          break;
        }
      }
      if (cols[c].kind == ColumnKind::Numeric) ++fi;
      if (cols[c].kind == ColumnKind::Identifier) ++idi;
    }
  }
  return ds;
}

Dataset load_csv(const std::filesystem::path& path, const FeatureSchema& schema,
                 const LoadOptions& opts) {
  return parse_csv(read_file(path), schema, opts);
}

std::string to_csv(const Dataset& ds) {
  const auto& cols = ds.schema.columns();
  // An unlabeled dataset writes no label column at all, so the output always
  // re-loads under the same schema.
  const bool labeled = ds.has_labels();
  std::string out;
  bool first = true;
  for (const Column& c : cols) {
    if (c.kind == ColumnKind::Label && !labeled) continue;
    if (!first) out.push_back(',');
    out.append(c.name);
    first = false;
  }
  out.push_back('\n');
  for (Eigen::Index r = 0; r < ds.size(); ++r) {
    int fi = 0;
    int idi = 0;
    first = true;
    for (const Column& c : cols) {
      if (c.kind == ColumnKind::Label && !labeled) continue;
      if (!first) out.push_back(',');
      first = false;
      switch (c.kind) {
        case ColumnKind::Numeric:
          out.append(fmt_double(ds.features(r, fi++)));
          break;
        case ColumnKind::Identifier:
          out.append(ds.id_cells[static_cast<std::size_t>(idi++)][static_cast<std::size_t>(r)]);
          break;
        case ColumnKind::Label:
          out.append(std::to_string(ds.labels[r]));
          break;
      }
    }
    out.push_back('\n');
  }
  return out;
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
  write_file(path, to_csv(ds));
}

ValidationReport validate(const Dataset& ds) {
  ValidationReport rep;
  rep.rows = ds.size();
  rep.total_columns = ds.schema.total_columns();
  rep.feature_columns = ds.schema.feature_count();
  rep.has_labels = ds.has_labels();

  const auto& names = ds.schema.feature_names();
  for (int f = 0; f < ds.schema.feature_count(); ++f) {
    ColumnReport col;
    col.name = names[static_cast<std::size_t>(f)];
    bool constant = ds.size() > 0;
    double first = ds.size() > 0 ? ds.features(0, f) : 0.0;
    for (Eigen::Index r = 0; r < ds.size(); ++r) {
      double v = ds.features(r, f);
      if (!std::isfinite(v)) ++col.missing;
      if (v != first) constant = false;
    }
    col.constant = constant;
    rep.missing_total += col.missing;
    rep.columns.push_back(std::move(col));
  }
  if (rep.has_labels) {
    auto [c0, c1] = class_balance(ds);
    rep.class0 = c0;
    rep.class1 = c1;
    rep.single_class = ds.size() > 0 && (c0 == 0 || c1 == 0);
  }
  return rep;
}

std::string ValidationReport::to_kv() const {
  KvWriter kv;
  kv.add("validation.rows", rows);
  kv.add("validation.total_columns", static_cast<long long>(total_columns));
  kv.add("validation.feature_columns", static_cast<long long>(feature_columns));
  kv.add("validation.missing_total", missing_total);
  kv.add("validation.has_labels", has_labels);
  kv.add("validation.class0", class0);
  kv.add("validation.class1", class1);
  kv.add("validation.single_class", single_class);
  kv.add("validation.defects", defects());
  std::string constants;
  for (const ColumnReport& c : columns) {
    if (!c.constant) continue;
    if (!constants.empty()) constants.push_back(',');
    constants.append(c.name);
  }
  kv.add("validation.constant_columns", constants.empty() ? "-" : constants);
  for (const ColumnReport& c : columns)
    kv.add("validation.column." + c.name + ".missing", c.missing);
  return kv.str();
}

std::pair<long long, long long> class_balance(const Dataset& ds) {
  long long c0 = 0, c1 = 0;
  for (Eigen::Index i = 0; i < ds.labels.size(); ++i)
    (ds.labels[i] == 0 ? c0 : c1) += 1;
  return {c0, c1};
}

Dataset take(const Dataset& ds, std::span<const int> rows) {
  Dataset out;
  out.schema = ds.schema;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), ds.features.cols());
  if (ds.labels.size() > 0) out.labels.resize(static_cast<Eigen::Index>(rows.size()));
  out.id_cells.resize(ds.id_cells.size());
  for (auto& col : out.id_cells) col.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Eigen::Index r = rows[i];
    out.features.row(static_cast<Eigen::Index>(i)) = ds.features.row(r);
    if (ds.labels.size() > 0) out.labels[static_cast<Eigen::Index>(i)] = ds.labels[r];
    for (std::size_t c = 0; c < ds.id_cells.size(); ++c)
      out.id_cells[c][i] = ds.id_cells[c][static_cast<std::size_t>(r)];
  }
  return out;
}

namespace {

long long round_half_up(double x) { return static_cast<long long>(std::floor(x + 0.5)); }

}  // namespace

std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw ConfigInvalid("train_fraction must lie in (0,1)");
  const Eigen::Index n = ds.size();
  if (n < 2) throw TooFewSamples("need at least 2 samples to split");

  std::vector<char> in_train(static_cast<std::size_t>(n), 0);
  Rng rng(spec.seed);

  if (spec.stratified) {
    if (!ds.has_labels()) throw EmptyClass("stratified split requires labels");
    std::vector<int> by_class[2];
    for (Eigen::Index i = 0; i < n; ++i)
      by_class[ds.labels[i]].push_back(static_cast<int>(i));
    if (by_class[0].empty() || by_class[1].empty())
      throw EmptyClass("stratified split requires both classes present");
    for (auto& cls : by_class) {
      rng.shuffle(cls);
      const long long k = round_half_up(spec.train_fraction * static_cast<double>(cls.size()));
      for (long long i = 0; i < k; ++i)
        in_train[static_cast<std::size_t>(cls[static_cast<std::size_t>(i)])] = 1;
    }
  } else {
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = static_cast<int>(i);
    rng.shuffle(idx);
    const long long k = round_half_up(spec.train_fraction * static_cast<double>(n));
    for (long long i = 0; i < k; ++i)
      in_train[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = 1;
  }

  std::vector<int> train_rows, test_rows;
  for (Eigen::Index i = 0; i < n; ++i)
    (in_train[static_cast<std::size_t>(i)] ? train_rows : test_rows).push_back(static_cast<int>(i));
  return {take(ds, train_rows), take(ds, test_rows)};
}

Dataset synth_generate(int n_per_class, std::uint64_t seed) {
  if (n_per_class < 1) throw ConfigInvalid("n_per_class must be >= 1");
  const FeatureSchema schema = FeatureSchema::kaggle_default();
  const Eigen::Index n = 2 * static_cast<Eigen::Index>(n_per_class);

  Dataset ds;
  ds.schema = schema;
  ds.features.resize(n, schema.feature_count());
  ds.labels.resize(n);
  ds.id_cells.assign(2, std::vector<std::string>(static_cast<std::size_t>(n)));

  auto col = [&](const char* name) {
    auto idx = schema.feature_index(name);
    if (!idx) throw UnmappedColumn(std::string("synth: no column ") + name);
    return *idx;
  };
  const int machine = col("Machine"), debug_size = col("DebugSize"),
            debug_rva = col("DebugRVA"), major_image = col("MajorImageVersion"),
            major_os = col("MajorOSVersion"), export_rva = col("ExportRVA"),
            export_size = col("ExportSize"), iat_rva = col("IatRVA"),
            maj_linker = col("MajorLinkerVersion"), min_linker = col("MinorLinkerVersion"),
            n_sections = col("NumberOfSections"), stack_reserve = col("SizeOfStackReserve"),
            dll_chars = col("DllCharacteristics"), resource_size = col("ResourceSize"),
            bitcoin = col("BitcoinAddresses");

  Rng rng(seed);
  static const double kMachines[] = {0x14c, 0x8664};
  static const double kStacks[] = {0x100000, 0x200000, 0x400000};
  static const char* kHex = "0123456789abcdef";

  for (Eigen::Index r = 0; r < n; ++r) {
    const int label = static_cast<int>(r % 2);  // 0 = malware, 1 = legitimate
    auto& row = ds.features;
    row(r, machine) = kMachines[rng.next_below(2)];
    row(r, major_os) = static_cast<double>(rng.next_int(4, 10));
    row(r, maj_linker) = static_cast<double>(rng.next_int(2, 14));
    row(r, min_linker) = static_cast<double>(rng.next_int(0, 40));
    row(r, n_sections) = static_cast<double>(rng.next_int(1, 10));
    row(r, stack_reserve) = kStacks[rng.next_below(3)];
    row(r, dll_chars) = static_cast<double>(rng.next_below(0x10000) & 0xD5E0);
    if (label == kLegitimateLabel) {
      row(r, major_image) = static_cast<double>(rng.next_int(1, 10));
      row(r, export_size) = static_cast<double>(rng.next_int(64, 8192));
      row(r, export_rva) = static_cast<double>(rng.next_int(0x1000, 0x90000));
      row(r, debug_size) = static_cast<double>(rng.next_int(28, 1024));
      row(r, debug_rva) = static_cast<double>(rng.next_int(0x1000, 0x90000));
      row(r, iat_rva) = 4096.0;
      row(r, resource_size) = static_cast<double>(rng.next_int(480, 200000));
      row(r, bitcoin) = 0.0;
    } else {
      row(r, major_image) = 0.0;
      row(r, export_size) = 0.0;
      row(r, export_rva) = 0.0;
      row(r, debug_size) = 0.0;
      row(r, debug_rva) = 0.0;
      // Malware-pattern IAT: absent, or far above any plausible header RVA.
      row(r, iat_rva) = rng.next_below(2) == 0
                            ? 0.0
                            : static_cast<double>(rng.next_int((1ll << 28) + 1, 1ll << 31));
      row(r, resource_size) = 0.0;
      row(r, bitcoin) = static_cast<double>(rng.next_int(0, 5));
    }
    ds.labels[r] = label;

    std::string name = (label == kLegitimateLabel ? "legit_" : "mal_") + std::to_string(r) + ".exe";
    std::string hash(32, '0');
    for (char& ch : hash) ch = kHex[rng.next_below(16)];
    ds.id_cells[0][static_cast<std::size_t>(r)] = std::move(name);
    ds.id_cells[1][static_cast<std::size_t>(r)] = std::move(hash);
  }
  return ds;
}

}  // namespace rdet
