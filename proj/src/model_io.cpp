#include "rdet/model_io.hpp"

#include <charconv>
#include <cmath>

#include "rdet/errors.hpp"
#include "rdet/hash.hpp"
#include "rdet/textio.hpp"

namespace rdet {
namespace {

constexpr int kFormatVersion = 1;

void put_param(std::string& out, std::string_view key, std::string_view value) {
  out.append("param ");
  out.append(key);
  out.push_back(' ');
  out.append(value);
  out.push_back('\n');
}

void put_param(std::string& out, std::string_view key, double value) {
  put_param(out, key, fmt_double(value));
}

void put_param(std::string& out, std::string_view key, long long value) {
  put_param(out, key, std::string_view(std::to_string(value)));
}

void put_trees(std::string& out, const std::vector<Tree>& trees) {
  out.append("trees ").append(std::to_string(trees.size())).push_back('\n');
  for (std::size_t t = 0; t < trees.size(); ++t) {
    out.append("tree ").append(std::to_string(t)).push_back(' ');
    out.append(std::to_string(trees[t].size())).push_back('\n');
    for (const TreeNode& nd : trees[t].nodes()) {
      if (nd.is_leaf()) {
        out.append("n l ").append(fmt_double(nd.value)).push_back('\n');
      } else {
        out.append("n s ").append(std::to_string(nd.feature)).push_back(' ');
        out.append(fmt_double(nd.threshold)).push_back(' ');
        out.append(std::to_string(nd.left)).push_back(' ');
        out.append(std::to_string(nd.right)).push_back('\n');
      }
    }
  }
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(sep);
    out.append(parts[i]);
  }
  return out;
}

/// Sequential line consumer with strict expectations; any deviation from the
/// canonical layout is treated as corruption.
class LineParser {
 public:
  explicit LineParser(std::string_view text) : lines_(split_lines(text)) {}

  bool done() const { return pos_ >= lines_.size(); }

  std::string_view peek() const {
    if (done()) throw CorruptModelFile("model file ends prematurely");
    return lines_[pos_];
  }

  std::vector<std::string_view> take() {
    std::vector<std::string_view> tokens = tokens_of(peek());
    ++pos_;
    return tokens;
  }

  std::vector<std::string_view> expect(std::string_view head, std::size_t n_fields) {
    std::vector<std::string_view> tokens = tokens_of(peek());
    if (tokens.empty() || tokens[0] != head || tokens.size() != n_fields + 1)
      throw CorruptModelFile("expected '" + std::string(head) + "' line, got: " +
                             std::string(peek()));
    ++pos_;
    tokens.erase(tokens.begin());
    return tokens;
  }

  static std::vector<std::string_view> tokens_of(std::string_view line) {
    std::vector<std::string_view> out;
    for (std::string_view t : split(line, ' '))
      if (!t.empty()) out.push_back(t);
    return out;
  }

 private:
  std::vector<std::string_view> lines_;
  std::size_t pos_ = 0;
};

double parse_real(std::string_view s) {
  try {
    return parse_double(s);
  } catch (const UnparsableValue&) {
    throw CorruptModelFile("bad real value in model file: " + std::string(s));
  }
}

long long parse_integer(std::string_view s) {
  try {
    return parse_int(s);
  } catch (const UnparsableValue&) {
    throw CorruptModelFile("bad integer in model file: " + std::string(s));
  }
}

std::vector<Tree> parse_trees(LineParser& in) {
  const long long count = parse_integer(in.expect("trees", 1)[0]);
  if (count < 0) throw CorruptModelFile("negative tree count");
  std::vector<Tree> trees;
  trees.reserve(static_cast<std::size_t>(count));
  for (long long t = 0; t < count; ++t) {
    auto head = in.expect("tree", 2);
    if (parse_integer(head[0]) != t) throw CorruptModelFile("tree indices out of order");
    const long long n_nodes = parse_integer(head[1]);
    if (n_nodes < 1) throw CorruptModelFile("tree with no nodes");
    std::vector<TreeNode> nodes;
    nodes.reserve(static_cast<std::size_t>(n_nodes));
    for (long long k = 0; k < n_nodes; ++k) {
      const std::string bad = "bad node line: " + std::string(in.peek());
      std::vector<std::string_view> tok = in.take();
      TreeNode nd;
      if (tok.size() == 3 && tok[0] == "n" && tok[1] == "l") {
        nd.value = parse_real(tok[2]);
      } else if (tok.size() == 6 && tok[0] == "n" && tok[1] == "s") {
        nd.feature = static_cast<int>(parse_integer(tok[2]));
        if (nd.feature < 0) throw CorruptModelFile("negative feature index");
        nd.threshold = parse_real(tok[3]);
        nd.left = static_cast<int>(parse_integer(tok[4]));
        nd.right = static_cast<int>(parse_integer(tok[5]));
      } else {
        throw CorruptModelFile(bad);
      }
      nodes.push_back(nd);
    }
    trees.push_back(Tree::from_nodes(std::move(nodes)));
  }
  return trees;
}

}  // namespace

std::string SavedModel::kind() const {
  if (std::holds_alternative<GbdtModel>(model)) return "gbdt";
  if (std::holds_alternative<ForestModel>(model)) return "forest";
  return "heuristic";
}

std::string save_model(const SavedModel& m) {
  std::string payload;
  payload.append("kind ").append(m.kind()).push_back('\n');
  payload.append("features ").append(join(m.feature_names, ',')).push_back('\n');
  payload.append("dataset_sha256 ").append(m.dataset_sha256).push_back('\n');
  payload.append("trained_at ").append(m.trained_at).push_back('\n');
  for (const auto& [name, value] : m.metric_summary) {
    payload.append("metric ").append(name).push_back(' ');
    payload.append(fmt_double(value)).push_back('\n');
  }

  if (const auto* g = std::get_if<GbdtModel>(&m.model)) {
    const GbdtParams& p = g->params;
    put_param(payload, "n_rounds", static_cast<long long>(p.n_rounds));
    put_param(payload, "learning_rate", p.learning_rate);
    put_param(payload, "lambda", p.lambda);
    put_param(payload, "gamma", p.gamma);
    put_param(payload, "base_score", p.base_score);
    put_param(payload, "max_depth", static_cast<long long>(p.grow.max_depth));
    put_param(payload, "min_leaf", static_cast<long long>(p.grow.min_leaf));
    put_param(payload, "min_gain", p.grow.min_gain);
    put_param(payload, "feature_subsample", p.grow.feature_subsample);
    put_param(payload, "seed", static_cast<long long>(p.seed));
    put_trees(payload, g->trees);
  } else if (const auto* f = std::get_if<ForestModel>(&m.model)) {
    const ForestParams& p = f->params;
    put_param(payload, "n_trees", static_cast<long long>(p.n_trees));
    put_param(payload, "bootstrap", std::string_view(p.bootstrap ? "true" : "false"));
    put_param(payload, "feature_subsample",
              p.feature_subsample ? std::string_view(fmt_double(*p.feature_subsample))
                                  : std::string_view("-"));
    put_param(payload, "max_depth", static_cast<long long>(p.grow.max_depth));
    put_param(payload, "min_leaf", static_cast<long long>(p.grow.min_leaf));
    put_param(payload, "min_gain", p.grow.min_gain);
    put_param(payload, "positive_label", static_cast<long long>(p.positive_label));
    put_param(payload, "seed", static_cast<long long>(p.seed));
    put_trees(payload, f->trees);
  } else {
    const HeuristicModel& h = std::get<HeuristicModel>(m.model);
    put_param(payload, "iat_large_threshold", h.options.iat_large_threshold);
  }
  payload.append("end\n");

  std::string out = "rdetmodel " + std::to_string(m.format_version) + "\n";
  out += "sha256 " + sha256_hex(payload) + "\n";
  out += payload;
  return out;
}

SavedModel load_model(std::string_view bytes) {
  // The checksum covers the exact payload bytes after the sha256 line.
  std::size_t nl1 = bytes.find('\n');
  if (nl1 == std::string_view::npos) throw CorruptModelFile("missing header line");
  std::size_t nl2 = bytes.find('\n', nl1 + 1);
  if (nl2 == std::string_view::npos) throw CorruptModelFile("missing checksum line");

  std::string_view header = bytes.substr(0, nl1);
  auto head_tokens = LineParser::tokens_of(header);
  if (head_tokens.size() != 2 || head_tokens[0] != "rdetmodel")
    throw CorruptModelFile("not a model file");
  const long long version = parse_integer(head_tokens[1]);
  if (version > kFormatVersion || version < 1)
    throw UnsupportedVersion("model format version " + std::to_string(version) +
                             " is not supported (this build reads up to " +
                             std::to_string(kFormatVersion) + ")");

  std::string_view checksum_line = bytes.substr(nl1 + 1, nl2 - nl1 - 1);
  auto sum_tokens = LineParser::tokens_of(checksum_line);
  if (sum_tokens.size() != 2 || sum_tokens[0] != "sha256")
    throw CorruptModelFile("missing sha256 line");
  std::string_view payload = bytes.substr(nl2 + 1);
  if (sha256_hex(payload) != sum_tokens[1])
    throw CorruptModelFile("checksum mismatch: model file is corrupt");

  LineParser in(payload);
  SavedModel m;
  m.format_version = static_cast<int>(version);
  const std::string kind(in.expect("kind", 1)[0]);
  {
    std::string_view f = in.expect("features", 1)[0];
    for (std::string_view name : split(f, ','))
      if (!name.empty()) m.feature_names.emplace_back(name);
  }
  m.dataset_sha256 = std::string(in.expect("dataset_sha256", 1)[0]);
  m.trained_at = std::string(in.expect("trained_at", 1)[0]);
  while (!in.done() && in.peek().starts_with("metric ")) {
    auto t = in.expect("metric", 2);
    m.metric_summary.emplace_back(std::string(t[0]), parse_real(t[1]));
  }

  auto param = [&](std::string_view key) {
    auto t = in.expect("param", 2);
    if (t[0] != key)
      throw CorruptModelFile("expected param " + std::string(key) + ", got " +
                             std::string(t[0]));
    return t[1];
  };

  if (kind == "gbdt") {
    GbdtModel g;
    g.params.n_rounds = static_cast<int>(parse_integer(param("n_rounds")));
    g.params.learning_rate = parse_real(param("learning_rate"));
    g.params.lambda = parse_real(param("lambda"));
    g.params.gamma = parse_real(param("gamma"));
    g.params.base_score = parse_real(param("base_score"));
    g.params.grow.max_depth = static_cast<int>(parse_integer(param("max_depth")));
    g.params.grow.min_leaf = static_cast<int>(parse_integer(param("min_leaf")));
    g.params.grow.min_gain = parse_real(param("min_gain"));
    g.params.grow.feature_subsample = parse_real(param("feature_subsample"));
    g.params.seed = static_cast<std::uint64_t>(parse_integer(param("seed")));
    g.base_margin = std::log(g.params.base_score / (1.0 - g.params.base_score));
    g.n_features = static_cast<int>(m.feature_names.size());
    g.trees = parse_trees(in);
    m.model = std::move(g);
  } else if (kind == "forest") {
    ForestModel f;
    f.params.n_trees = static_cast<int>(parse_integer(param("n_trees")));
    std::string_view bs = param("bootstrap");
    if (bs != "true" && bs != "false") throw CorruptModelFile("bad bootstrap flag");
    f.params.bootstrap = bs == "true";
    std::string_view fs = param("feature_subsample");
    if (fs != "-") f.params.feature_subsample = parse_real(fs);
    f.params.grow.max_depth = static_cast<int>(parse_integer(param("max_depth")));
    f.params.grow.min_leaf = static_cast<int>(parse_integer(param("min_leaf")));
    f.params.grow.min_gain = parse_real(param("min_gain"));
    f.params.positive_label = static_cast<int>(parse_integer(param("positive_label")));
    f.params.seed = static_cast<std::uint64_t>(parse_integer(param("seed")));
    f.n_features = static_cast<int>(m.feature_names.size());
    f.trees = parse_trees(in);
    m.model = std::move(f);
  } else if (kind == "heuristic") {
    HeuristicModel h;
    h.options.iat_large_threshold = parse_real(param("iat_large_threshold"));
    m.model = std::move(h);
  } else {
    throw CorruptModelFile("unknown model kind: " + kind);
  }
  in.expect("end", 0);
  if (!in.done()) throw CorruptModelFile("trailing content after 'end'");
  return m;
}

void save_model_file(const SavedModel& m, const std::filesystem::path& path) {
  write_file(path, save_model(m));
}

SavedModel load_model_file(const std::filesystem::path& path) {
  return load_model(read_file(path));
}

namespace {

double heuristic_malware_score(const HeuristicModel& h, FeatureRef x,
                               const FeatureSchema& schema) {
  const HeuristicVerdict v = baseline_heuristic(x, schema, h.options);
  // Fraction of the four simultaneously satisfiable malware patterns (the
  // two IAT modes are mutually exclusive), so the score ranks by how many
  // patterns a row exhibits and is 0 exactly when the verdict is legitimate.
  return std::min(1.0, static_cast<double>(v.fired_rules.size()) / 4.0);
}

}  // namespace

double positive_score(const SavedModel& m, FeatureRef x, int positive,
                      const FeatureSchema& schema) {
  if (const auto* g = std::get_if<GbdtModel>(&m.model)) {
    const double p1 = predict_proba(*g, x);  // probability of label 1
    return positive == 1 ? p1 : 1.0 - p1;
  }
  if (const auto* f = std::get_if<ForestModel>(&m.model)) {
    const double p = predict_proba(*f, x);  // score of the model's positive
    return positive == f->params.positive_label ? p : 1.0 - p;
  }
  const double malware = heuristic_malware_score(std::get<HeuristicModel>(m.model), x, schema);
  return positive == kMalwareLabel ? malware : 1.0 - malware;
}

int predict_label(const SavedModel& m, FeatureRef x, const FeatureSchema& schema) {
  if (const auto* g = std::get_if<GbdtModel>(&m.model)) {
    const double p1 = predict_proba(*g, x);
    if (p1 == 0.5) return kMalwareLabel;
    return p1 > 0.5 ? 1 : 0;
  }
  if (const auto* f = std::get_if<ForestModel>(&m.model)) return predict(*f, x);
  return baseline_heuristic(x, schema, std::get<HeuristicModel>(m.model).options).label;
}

}  // namespace rdet
