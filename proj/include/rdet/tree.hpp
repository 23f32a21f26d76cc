#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rdet/errors.hpp"
#include "rdet/rng.hpp"
#include "rdet/types.hpp"

namespace rdet {

struct GrowParams {
  int max_depth = 6;             // root is depth 0; a node splits only while depth < max_depth
  int min_leaf = 1;              // minimum training samples per child
  double min_gain = 0.0;         // a split must score strictly above this
  double feature_subsample = 1.0;  // fraction of features drawn per split, (0,1]

  void validate() const {
    if (max_depth < 1) throw ConfigInvalid("max_depth must be >= 1");
    if (min_leaf < 1) throw ConfigInvalid("min_leaf must be >= 1");
    if (min_gain < 0.0) throw ConfigInvalid("min_gain must be >= 0");
    if (!(feature_subsample > 0.0 && feature_subsample <= 1.0))
      throw ConfigInvalid("feature_subsample must lie in (0,1]");
  }
};

struct SplitCandidate {
  int feature_index = -1;
  double threshold = 0.0;
  double gain = 0.0;
  long long left_count = 0;
  long long right_count = 0;
};

/// Flat node record. feature < 0 marks a leaf; internal nodes route a sample
/// left iff x[feature] < threshold. Children always sit at larger indices
/// than their parent (preorder), which rules out routing cycles.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

class Tree {
 public:
  Tree() = default;

  static Tree leaf(double value) {
    Tree t;
    TreeNode n;
    n.value = value;
    t.nodes_.push_back(n);
    return t;
  }

  /// Rebuilds a tree from serialized nodes, checking structural sanity.
  static Tree from_nodes(std::vector<TreeNode> nodes);

  int size() const { return static_cast<int>(nodes_.size()); }
  bool empty() const { return nodes_.empty(); }
  const TreeNode& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  bool root_is_leaf() const { return nodes_.size() == 1 && nodes_[0].is_leaf(); }
  int depth() const;

  /// Value of the unique leaf reached by threshold routing.
  double predict_one(FeatureRef x) const;

 private:
  friend class TreeBuilder;
  std::vector<TreeNode> nodes_;
};

inline double predict_one(const Tree& tree, FeatureRef x) { return tree.predict_one(x); }

/// Split quality by Gini impurity decrease; leaf payload is the fraction of
/// positive-class samples. Stats are integer counts, so accumulation order
/// never affects results.
class GiniObjective {
 public:
  GiniObjective(const IntVector& labels, int positive_label)
      : labels_(&labels), positive_(positive_label) {}

  struct Stats {
    long long n = 0;
    long long pos = 0;
    Stats& operator+=(const Stats& o) {
      n += o.n;
      pos += o.pos;
      return *this;
    }
    Stats operator-(const Stats& o) const { return {n - o.n, pos - o.pos}; }
    long long count() const { return n; }
  };

  Stats row_stats(int row) const {
    return {1, (*labels_)[row] == positive_ ? 1ll : 0ll};
  }

  Stats node_stats(std::span<const int> rows) const {
    Stats s;
    for (int r : rows) s += row_stats(r);
    return s;
  }

  static double impurity(const Stats& s) {
    if (s.n == 0) return 0.0;
    const double p = static_cast<double>(s.pos) / static_cast<double>(s.n);
    const double q = 1.0 - p;
    return 1.0 - p * p - q * q;
  }

  double gain(const Stats& parent, const Stats& left, const Stats& right) const {
    const double np = static_cast<double>(parent.n);
    return impurity(parent) - (static_cast<double>(left.n) / np * impurity(left) +
                               static_cast<double>(right.n) / np * impurity(right));
  }

  double leaf_value(const Stats& s) const {
    return s.n == 0 ? 0.0 : static_cast<double>(s.pos) / static_cast<double>(s.n);
  }

  std::pair<double, double> tie_keys(int row) const {
    return {static_cast<double>((*labels_)[row]), 0.0};
  }

 private:
  const IntVector* labels_;
  int positive_;
};

/// Second-order boosting split quality: the regularized score difference
/// 1/2 [G_L^2/(H_L+l) + G_R^2/(H_R+l) - G^2/(H+l)] - gamma, with the Newton
/// leaf weight -G/(H+l).
///
/// Floating-point sums depend on accumulation order, so node totals are
/// summed over the (g,h) pairs in sorted order and scans sort ties by (g,h).
/// That makes grown trees, and therefore predictions, independent of the
/// ordering of the training rows.
class BoostObjective {
 public:
  BoostObjective(const Vector& grad, const Vector& hess, double lambda, double gamma)
      : g_(&grad), h_(&hess), lambda_(lambda), gamma_(gamma) {}

  struct Stats {
    double g = 0.0;
    double h = 0.0;
    long long n = 0;
    Stats& operator+=(const Stats& o) {
      g += o.g;
      h += o.h;
      n += o.n;
      return *this;
    }
    Stats operator-(const Stats& o) const { return {g - o.g, h - o.h, n - o.n}; }
    long long count() const { return n; }
  };

  Stats row_stats(int row) const { return {(*g_)[row], (*h_)[row], 1}; }

  Stats node_stats(std::span<const int> rows) const {
    std::vector<std::pair<double, double>> gh;
    gh.reserve(rows.size());
    for (int r : rows) gh.emplace_back((*g_)[r], (*h_)[r]);
    std::sort(gh.begin(), gh.end());
    Stats s;
    for (const auto& [g, h] : gh) {
      s.g += g;
      s.h += h;
      ++s.n;
    }
    return s;
  }

  double score(const Stats& s) const { return s.g * s.g / (s.h + lambda_); }

  double gain(const Stats& parent, const Stats& left, const Stats& right) const {
    return 0.5 * (score(left) + score(right) - score(parent)) - gamma_;
  }

  double leaf_value(const Stats& s) const { return -s.g / (s.h + lambda_); }

  std::pair<double, double> tie_keys(int row) const { return {(*g_)[row], (*h_)[row]}; }

 private:
  const Vector* g_;
  const Vector* h_;
  double lambda_;
  double gamma_;
};

/// Midpoint between adjacent distinct values, kept strictly above `a` so the
/// strict-less routing never places a training value on its own threshold.
inline double split_midpoint(double a, double b) {
  double mid = a / 2.0 + b / 2.0;
  if (!(mid > a) || !(mid <= b)) mid = b;
  return mid;
}

/// Exact greedy search over every (feature, midpoint-between-adjacent-
/// distinct-values) pair among candidate_features. Returns the candidate
/// with the largest gain strictly above params.min_gain, breaking exact ties
/// toward the lowest feature index, then the lowest threshold. Absence of a
/// split is a value, not an error.
template <class Objective>
std::optional<SplitCandidate> best_split(const Matrix& X, std::span<const int> rows,
                                         const Objective& obj,
                                         std::span<const int> candidate_features,
                                         const GrowParams& params) {
  const std::size_t m = rows.size();
  if (m < 2 * static_cast<std::size_t>(params.min_leaf)) return std::nullopt;

  const typename Objective::Stats parent = obj.node_stats(rows);

  struct Entry {
    double value;
    int row;
  };
  std::vector<Entry> order(m);
  std::optional<SplitCandidate> best;

  for (int f : candidate_features) {
    for (std::size_t i = 0; i < m; ++i) order[i] = {X(rows[i], f), rows[i]};
    std::sort(order.begin(), order.end(), [&](const Entry& a, const Entry& b) {
      if (a.value != b.value) return a.value < b.value;
      const auto ka = obj.tie_keys(a.row);
      const auto kb = obj.tie_keys(b.row);
      if (ka != kb) return ka < kb;
      return a.row < b.row;
    });

    typename Objective::Stats left;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      left += obj.row_stats(order[i].row);
      if (!(order[i + 1].value > order[i].value)) continue;  // same value group
      const long long nl = left.count();
      const long long nr = parent.count() - nl;
      if (nl < params.min_leaf || nr < params.min_leaf) continue;
      const typename Objective::Stats right = parent - left;
      const double gain = obj.gain(parent, left, right);
      if (!(gain > params.min_gain)) continue;
      if (!best || gain > best->gain) {
        best = SplitCandidate{f, split_midpoint(order[i].value, order[i + 1].value), gain,
                              nl, nr};
      }
    }
  }
  return best;
}

namespace detail {

inline int subsample_count(double fraction, int d) {
  int k = static_cast<int>(std::ceil(fraction * static_cast<double>(d) - 1e-9));
  return std::clamp(k, 1, d);
}

template <class Objective>
int grow_node(std::vector<TreeNode>& nodes, const Matrix& X, std::vector<int>& rows,
              const Objective& obj, const GrowParams& params, Rng& rng, int depth) {
  const typename Objective::Stats stats = obj.node_stats(rows);

  std::optional<SplitCandidate> cand;
  if (depth < params.max_depth &&
      rows.size() >= 2 * static_cast<std::size_t>(params.min_leaf)) {
    const int d = static_cast<int>(X.cols());
    const int k = subsample_count(params.feature_subsample, d);
    std::vector<int> features;
    if (k == d) {
      features.resize(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) features[static_cast<std::size_t>(i)] = i;
    } else {
      features = rng.sample_without_replacement(d, k);
      std::sort(features.begin(), features.end());
    }
    cand = best_split(X, rows, obj, features, params);
  }

  const int index = static_cast<int>(nodes.size());
  nodes.emplace_back();
  if (!cand) {
    nodes[static_cast<std::size_t>(index)].value = obj.leaf_value(stats);
    return index;
  }

  std::vector<int> left_rows, right_rows;
  left_rows.reserve(static_cast<std::size_t>(cand->left_count));
  right_rows.reserve(static_cast<std::size_t>(cand->right_count));
  for (int r : rows)
    (X(r, cand->feature_index) < cand->threshold ? left_rows : right_rows).push_back(r);
  rows.clear();
  rows.shrink_to_fit();

  const int left = grow_node(nodes, X, left_rows, obj, params, rng, depth + 1);
  const int right = grow_node(nodes, X, right_rows, obj, params, rng, depth + 1);
  TreeNode& nd = nodes[static_cast<std::size_t>(index)];
  nd.feature = cand->feature_index;
  nd.threshold = cand->threshold;
  nd.left = left;
  nd.right = right;
  return index;
}

}  // namespace detail

class TreeBuilder {
 public:
  template <class Objective>
  static Tree grow(const Matrix& X, std::span<const int> rows, const Objective& obj,
                   const GrowParams& params, Rng& rng) {
    params.validate();
    if (rows.empty()) throw EmptyNode("grow requires at least one sample");
    Tree t;
    std::vector<int> work(rows.begin(), rows.end());
    detail::grow_node(t.nodes_, X, work, obj, params, rng, 0);
    return t;
  }
};

/// Recursively applies best_split until max_depth, min_leaf or min_gain stops
/// growth; leaves take the objective-defined optimal value. Deterministic
/// given the rng seed and input order.
template <class Objective>
Tree grow(const Matrix& X, std::span<const int> rows, const Objective& obj,
          const GrowParams& params, Rng& rng) {
  return TreeBuilder::grow(X, rows, obj, params, rng);
}

}  // namespace rdet
