#include "rdet/forest.hpp"

#include <algorithm>
#include <cmath>

#include "rdet/errors.hpp"
#include "rdet/rng.hpp"

namespace rdet {

void ForestParams::validate() const {
  if (n_trees < 1) throw ConfigInvalid("n_trees must be >= 1");
  if (feature_subsample && !(*feature_subsample > 0.0 && *feature_subsample <= 1.0))
    throw ConfigInvalid("feature_subsample must lie in (0,1]");
  if (positive_label != 0 && positive_label != 1)
    throw ConfigInvalid("positive_label must be 0 or 1");
  grow.validate();
}

double ForestParams::effective_feature_fraction(int n_features) const {
  if (feature_subsample) return *feature_subsample;
  const double k = std::ceil(std::sqrt(static_cast<double>(n_features)));
  return k / static_cast<double>(n_features);
}

ForestModel train(const Dataset& ds, const ForestParams& params) {
  params.validate();
  const Eigen::Index n = ds.size();
  if (n == 0 || !ds.has_labels()) throw SingleClassDataset("training data is empty or unlabeled");
  auto [c0, c1] = class_balance(ds);
  if (c0 == 0 || c1 == 0)
    throw SingleClassDataset("training data contains a single class");

  ForestModel model;
  model.params = params;
  model.n_features = static_cast<int>(ds.features.cols());

  GrowParams grow_params = params.grow;
  grow_params.feature_subsample = params.effective_feature_fraction(model.n_features);

  GiniObjective obj(ds.labels, params.positive_label);
  model.trees.resize(static_cast<std::size_t>(params.n_trees));
  for (int t = 0; t < params.n_trees; ++t) {
    Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(t)));
    std::vector<int> rows(static_cast<std::size_t>(n));
    if (params.bootstrap) {
      for (auto& r : rows)
        r = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
      std::sort(rows.begin(), rows.end());
    } else {
      for (Eigen::Index i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = static_cast<int>(i);
    }
    model.trees[static_cast<std::size_t>(t)] = grow(ds.features, rows, obj, grow_params, rng);
  }
  return model;
}

namespace {

void check_width(const ForestModel& model, FeatureRef x) {
  if (x.size() != model.n_features)
    throw FeatureLengthMismatch("expected " + std::to_string(model.n_features) +
                                " features, got " + std::to_string(x.size()));
}

}  // namespace

int predict(const ForestModel& model, FeatureRef x) {
  check_width(model, x);
  long long positive_votes = 0;
  for (const Tree& t : model.trees)
    if (t.predict_one(x) >= 0.5) ++positive_votes;
  const long long total = static_cast<long long>(model.trees.size());
  const bool positive = 2 * positive_votes >= total;  // tie -> positive class
  return positive ? model.params.positive_label : 1 - model.params.positive_label;
}

double predict_proba(const ForestModel& model, FeatureRef x) {
  check_width(model, x);
  double sum = 0.0;
  for (const Tree& t : model.trees) sum += t.predict_one(x);
  return sum / static_cast<double>(model.trees.size());
}

IntVector predict_batch(const ForestModel& model, const Matrix& X) {
  IntVector out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) out[i] = predict(model, X.row(i).transpose());
  return out;
}

Vector predict_proba_batch(const ForestModel& model, const Matrix& X) {
  Vector out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    out[i] = predict_proba(model, X.row(i).transpose());
  return out;
}

}  // namespace rdet
