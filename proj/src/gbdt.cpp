#include "rdet/gbdt.hpp"

#include <cmath>

#include "rdet/errors.hpp"
#include "rdet/rng.hpp"

namespace rdet {

namespace {
constexpr double kProbClamp = 1e-15;

double clamp_proba(double p) {
  return std::min(1.0 - kProbClamp, std::max(kProbClamp, p));
}
}  // namespace

void GbdtParams::validate() const {
  if (n_rounds < 1) throw ConfigInvalid("n_rounds must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0))
    throw ConfigInvalid("learning_rate must lie in (0,1]");
  if (lambda < 0.0) throw ConfigInvalid("lambda must be >= 0");
  if (gamma < 0.0) throw ConfigInvalid("gamma must be >= 0");
  if (!(base_score > 0.0 && base_score < 1.0))
    throw ConfigInvalid("base_score must lie in (0,1)");
  grow.validate();
}

double sigmoid(double margin) { return 1.0 / (1.0 + std::exp(-margin)); }

std::pair<double, double> gradient_check(int label, double margin) {
  const double p = clamp_proba(sigmoid(margin));
  return {p - static_cast<double>(label), p * (1.0 - p)};
}

double logistic_loss(int label, double margin) {
  const double p = clamp_proba(sigmoid(margin));
  return label == 1 ? -std::log(p) : -std::log(1.0 - p);
}

GbdtModel train_traced(const Dataset& ds, const GbdtParams& params, GbdtTrace* trace) {
  params.validate();
  const Eigen::Index n = ds.size();
  if (n == 0 || !ds.has_labels()) throw SingleClassDataset("training data is empty or unlabeled");
  auto [c0, c1] = class_balance(ds);
  if (c0 == 0 || c1 == 0)
    throw SingleClassDataset("training data contains a single class");

  GbdtModel model;
  model.params = params;
  model.n_features = static_cast<int>(ds.features.cols());
  model.base_margin = std::log(params.base_score / (1.0 - params.base_score));

  Vector margins = Vector::Constant(n, model.base_margin);
  Vector grad(n), hess(n);
  std::vector<int> rows(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = static_cast<int>(i);

  for (int round = 0; round < params.n_rounds; ++round) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double p = clamp_proba(sigmoid(margins[i]));
      grad[i] = p - static_cast<double>(ds.labels[i]);
      hess[i] = p * (1.0 - p);
    }
    BoostObjective obj(grad, hess, params.lambda, params.gamma);
    Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(round)));
    Tree tree = grow(ds.features, rows, obj, params.grow, rng);
    if (tree.root_is_leaf()) break;  // no split gained anything: stop boosting

    for (Eigen::Index i = 0; i < n; ++i)
      margins[i] += params.learning_rate * tree.predict_one(ds.features.row(i).transpose());
    model.trees.push_back(std::move(tree));

    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) loss += logistic_loss(ds.labels[i], margins[i]);
    loss /= static_cast<double>(n);
    if (!std::isfinite(loss)) throw NonFiniteLoss("training loss diverged");
    if (trace) trace->round_losses.push_back(loss);
  }
  return model;
}

GbdtModel train(const Dataset& ds, const GbdtParams& params) {
  return train_traced(ds, params, nullptr);
}

double predict_margin(const GbdtModel& model, FeatureRef x) {
  if (x.size() != model.n_features)
    throw FeatureLengthMismatch("expected " + std::to_string(model.n_features) +
                                " features, got " + std::to_string(x.size()));
  double margin = model.base_margin;
  for (const Tree& t : model.trees) margin += model.params.learning_rate * t.predict_one(x);
  return margin;
}

double predict_proba(const GbdtModel& model, FeatureRef x) {
  return sigmoid(predict_margin(model, x));
}

Vector predict_margin_batch(const GbdtModel& model, const Matrix& X) {
  Vector out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    out[i] = predict_margin(model, X.row(i).transpose());
  return out;
}

Vector predict_proba_batch(const GbdtModel& model, const Matrix& X) {
  Vector out = predict_margin_batch(model, X);
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = sigmoid(out[i]);
  return out;
}

}  // namespace rdet
