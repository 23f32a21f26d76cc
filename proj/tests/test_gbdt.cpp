#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "rdet/dataset.hpp"
#include "rdet/gbdt.hpp"
#include "rdet/model_io.hpp"
#include "rdet/rng.hpp"
#include "test_util.hpp"

using namespace rdet;

namespace {

FeatureSchema plain_schema(int d) {
  std::vector<Column> cols;
  for (int i = 0; i < d; ++i)
    cols.push_back({"f" + std::to_string(i), ColumnKind::Numeric, {}});
  cols.push_back({"y", ColumnKind::Label, {}});
  return FeatureSchema(std::move(cols));
}

Dataset from_arrays(const Matrix& X, const IntVector& y) {
  Dataset ds;
  ds.schema = plain_schema(static_cast<int>(X.cols()));
  ds.features = X;
  ds.labels = y;
  return ds;
}

// Mildly noisy two-feature data so boosting has many useful rounds.
Dataset noisy_dataset(int n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix X(n, 2);
  IntVector y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = rng.next_real();
    X(i, 1) = rng.next_real();
    const double p = 0.15 + 0.7 * ((X(i, 0) > 0.5) != (X(i, 1) > 0.55) ? 1.0 : 0.0);
    y[i] = rng.next_real() < p ? 1 : 0;
  }
  return from_arrays(X, y);
}

}  // namespace

TEST_SUITE("gbdt") {

TEST_CASE("gradient_check: closed form at margin 0") {
  auto [g, h] = gradient_check(1, 0.0);
  CHECK(g == -0.5);
  CHECK(h == 0.25);
  auto [g0, h0] = gradient_check(0, 0.0);
  CHECK(g0 == 0.5);
  CHECK(h0 == 0.25);
}

TEST_CASE("gradient_check: matches central differences over [-10,10]") {
  const double step = 1e-4;
  for (int label = 0; label <= 1; ++label) {
    for (int k = 0; k <= 200; ++k) {
      const double m = -10.0 + 0.1 * k;
      auto [g, h] = gradient_check(label, m);
      const double fd_g = oracle::central_difference(&logistic_loss, label, m, step);
      CHECK(g == doctest::Approx(fd_g).epsilon(1e-6).scale(1.0));
      // h is the derivative of g.
      auto g_at = [](int y, double x) { return gradient_check(y, x).first; };
      const double fd_h = (g_at(label, m + step) - g_at(label, m - step)) / (2 * step);
      CHECK(h == doctest::Approx(fd_h).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("train: one round at unit rate reproduces the Newton leaf -G/H") {
  Matrix X(4, 1);
  X << 0, 0, 1, 1;
  IntVector y(4);
  y << 0, 0, 1, 1;
  GbdtParams p;
  p.n_rounds = 1;
  p.learning_rate = 1.0;
  p.lambda = 0.0;
  const GbdtModel m = train(from_arrays(X, y), p);
  REQUIRE(m.trees.size() == 1);
  // At margin 0: g = +-0.5, h = 0.25 per sample. Left G=1, H=0.5 -> leaf -2;
  // right G=-1 -> leaf +2. Hand-computed.
  const Tree& t = m.trees[0];
  REQUIRE(t.size() == 3);
  Vector lo(1), hi(1);
  lo << 0.0;
  hi << 1.0;
  CHECK(t.predict_one(lo) == -2.0);
  CHECK(t.predict_one(hi) == 2.0);
  CHECK(predict_margin(m, lo) == -2.0);  // base margin 0 + 1.0 * leaf
  CHECK(predict_proba(m, hi) == doctest::Approx(sigmoid(2.0)).epsilon(1e-15));
}

TEST_CASE("predict_margin: zero trees, single leaf, and the sum oracle") {
  GbdtModel empty;
  empty.n_features = 2;
  empty.base_margin = 0.0;  // logit(0.5)
  Vector x(2);
  x << 1.0, 2.0;
  CHECK(predict_margin(empty, x) == 0.0);

  GbdtModel one;
  one.n_features = 2;
  one.params.learning_rate = 0.1;
  one.trees.push_back(Tree::leaf(0.7));
  CHECK(predict_margin(one, x) == doctest::Approx(0.07).epsilon(1e-15));

  // Random model vs independent accumulation through the walker oracle.
  const Dataset ds = noisy_dataset(300, 8);
  GbdtParams p;
  p.n_rounds = 12;
  const GbdtModel m = train(ds, p);
  Rng rng(55);
  for (int k = 0; k < 100; ++k) {
    Vector v(2);
    v << rng.next_real(), rng.next_real();
    double acc = m.base_margin;
    for (const Tree& t : m.trees) acc += p.learning_rate * oracle::walk_tree(t, v);
    CHECK(predict_margin(m, v) == doctest::Approx(acc).epsilon(1e-12));
  }

  Vector wrong(3);
  wrong << 1, 2, 3;
  CHECK_THROWS_AS(predict_margin(m, wrong), FeatureLengthMismatch);
}

TEST_CASE("predict_proba: saturation and complement") {
  GbdtModel m;
  m.n_features = 1;
  Vector x(1);
  x << 0.0;
  CHECK(predict_proba(m, x) == 0.5);  // margin 0

  CHECK(sigmoid(40.0) == doctest::Approx(1.0).epsilon(1e-12));
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const double margin = rng.next_real() * 20.0 - 10.0;
    CHECK(sigmoid(margin) + sigmoid(-margin) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("train: mean log-loss is non-increasing per round") {
  const Dataset ds = noisy_dataset(400, 19);
  GbdtParams p;
  p.n_rounds = 40;
  GbdtTrace trace;
  train_traced(ds, p, &trace);
  REQUIRE(trace.round_losses.size() >= 2);
  for (std::size_t r = 1; r < trace.round_losses.size(); ++r)
    CHECK(trace.round_losses[r] <= trace.round_losses[r - 1] + 1e-12);
}

TEST_CASE("train: determinism and sample-order invariance") {
  const Dataset ds = noisy_dataset(250, 33);
  GbdtParams p;
  p.n_rounds = 15;
  p.seed = 9;

  auto bytes_of = [&](const GbdtModel& m) {
    SavedModel sm;
    sm.model = m;
    sm.feature_names = ds.schema.feature_names();
    return save_model(sm);
  };
  const GbdtModel a = train(ds, p);
  const GbdtModel b = train(ds, p);
  CHECK(bytes_of(a) == bytes_of(b));

  // Shuffle the training rows; predictions must be bitwise unchanged.
  std::vector<int> perm(static_cast<std::size_t>(ds.size()));
  std::iota(perm.begin(), perm.end(), 0);
  Rng shuffler(4);
  shuffler.shuffle(perm);
  const Dataset shuffled = take(ds, perm);
  const GbdtModel c = train(shuffled, p);
  Rng rng(70);
  for (int k = 0; k < 200; ++k) {
    Vector v(2);
    v << rng.next_real() * 2 - 0.5, rng.next_real() * 2 - 0.5;
    CHECK(predict_margin(a, v) == predict_margin(c, v));
  }
}

TEST_CASE("train: single class and degenerate features") {
  Matrix X(4, 1);
  X << 1, 2, 3, 4;
  IntVector same(4);
  same << 1, 1, 1, 1;
  CHECK_THROWS_AS(train(from_arrays(X, same), GbdtParams{}), SingleClassDataset);

  // Constant features: nothing to split on, training stops with zero trees
  // and predictions fall back to the base margin.
  Matrix C = Matrix::Constant(6, 2, 3.0);
  IntVector y(6);
  y << 0, 1, 0, 1, 0, 1;
  const GbdtModel m = train(from_arrays(C, y), GbdtParams{});
  CHECK(m.trees.empty());
  Vector x(2);
  x << 3.0, 3.0;
  CHECK(predict_proba(m, x) == 0.5);
}

TEST_CASE("train: separable synthetic data reaches perfect holdout accuracy") {
  const Dataset ds = synth_generate(120, 77);
  SplitSpec split;
  split.seed = 5;
  auto [train_ds, test_ds] = stratified_split(ds, split);
  GbdtParams p;
  p.n_rounds = 30;
  const GbdtModel m = train(train_ds, p);
  int correct = 0;
  for (Eigen::Index i = 0; i < test_ds.size(); ++i) {
    const double proba = predict_proba(m, test_ds.features.row(i).transpose());
    if ((proba > 0.5 ? 1 : 0) == test_ds.labels[i]) ++correct;
  }
  CHECK(correct == test_ds.size());
}

TEST_CASE("params validation") {
  GbdtParams p;
  p.n_rounds = 0;
  CHECK_THROWS_AS(p.validate(), ConfigInvalid);
  p = {};
  p.learning_rate = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigInvalid);
  p = {};
  p.base_score = 1.0;
  CHECK_THROWS_AS(p.validate(), ConfigInvalid);
  p = {};
  p.lambda = -1.0;
  CHECK_THROWS_AS(p.validate(), ConfigInvalid);
}

}  // TEST_SUITE
