#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rdet/dataset.hpp"
#include "rdet/tree.hpp"
#include "rdet/types.hpp"

namespace rdet {

struct ForestParams {
  int n_trees = 100;
  bool bootstrap = true;  // sample n rows with replacement per tree
  // Fraction of features drawn at each split. Unset means the sqrt rule:
  // ceil(sqrt(d)) of d features.
  std::optional<double> feature_subsample;
  GrowParams grow{32, 1, 0.0, 1.0};
  // Class whose fraction the leaves store; ties in voting go to this class.
  int positive_label = kMalwareLabel;
  std::uint64_t seed = 0;

  void validate() const;
  double effective_feature_fraction(int n_features) const;
};

/// Bagged Gini trees; leaf values are positive-class fractions.
struct ForestModel {
  ForestParams params;
  std::vector<Tree> trees;
  int n_features = 0;
};

/// Per tree: a bootstrap sample drawn with a seed derived from (seed, tree
/// index), then a Gini tree with per-split feature subsampling. Trees are
/// independent given their derived seeds, so results do not depend on
/// training order.
ForestModel train(const Dataset& ds, const ForestParams& params);

/// Hard majority vote: each tree votes its leaf's majority class; forest
/// ties go to the positive class. Returns a dataset label in {0,1}.
int predict(const ForestModel& model, FeatureRef x);

/// Mean of per-tree leaf fractions: the positive-class score in [0,1].
double predict_proba(const ForestModel& model, FeatureRef x);

IntVector predict_batch(const ForestModel& model, const Matrix& X);
Vector predict_proba_batch(const ForestModel& model, const Matrix& X);

}  // namespace rdet
