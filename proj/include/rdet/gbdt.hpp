#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rdet/dataset.hpp"
#include "rdet/tree.hpp"
#include "rdet/types.hpp"

namespace rdet {

struct GbdtParams {
  int n_rounds = 200;
  double learning_rate = 0.1;
  double lambda = 1.0;      // leaf L2 penalty
  double gamma = 0.0;       // per-split complexity penalty
  double base_score = 0.5;  // prior probability of label 1
  GrowParams grow{6, 1, 0.0, 1.0};
  std::uint64_t seed = 0;

  void validate() const;
};

/// Gradient-boosted trees for binary classification with the second-order
/// logistic objective. Stored leaf values are raw Newton weights; the
/// learning rate applies at accumulation time.
struct GbdtModel {
  GbdtParams params;
  std::vector<Tree> trees;
  double base_margin = 0.0;  // logit(base_score)
  int n_features = 0;
};

/// Stagewise fit: per round, gradients g = p - y and hessians h = p(1-p) at
/// the current margins drive an exact-greedy tree; margins advance by
/// learning_rate * leaf. Training halts early if a round produces a bare
/// root with no accepted split. Deterministic given the seed.
GbdtModel train(const Dataset& ds, const GbdtParams& params);

double predict_margin(const GbdtModel& model, FeatureRef x);
double predict_proba(const GbdtModel& model, FeatureRef x);
Vector predict_margin_batch(const GbdtModel& model, const Matrix& X);
Vector predict_proba_batch(const GbdtModel& model, const Matrix& X);

/// (g, h) of the logistic loss at one sample; exposed so tests can compare
/// against finite differences.
std::pair<double, double> gradient_check(int label, double margin);

double sigmoid(double margin);

/// Per-sample log-loss at a margin, with the same probability clamping the
/// trainer uses ([1e-15, 1-1e-15]).
double logistic_loss(int label, double margin);

/// Mean training log-loss per boosting round, recorded during train().
/// Returned alongside the model for diagnostics via train_traced.
struct GbdtTrace {
  std::vector<double> round_losses;
};

GbdtModel train_traced(const Dataset& ds, const GbdtParams& params, GbdtTrace* trace);

}  // namespace rdet
