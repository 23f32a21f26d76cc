#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "oracles.hpp"
#include "rdet/errors.hpp"
#include "rdet/metrics.hpp"
#include "rdet/rng.hpp"
#include "test_util.hpp"

using namespace rdet;

TEST_SUITE("metrics") {

TEST_CASE("confusion: direct counts") {
  const std::vector<int> t{1, 1, 0, 0};
  const std::vector<int> p{1, 0, 0, 0};
  const ConfusionMatrix cm = confusion(t, p, 1);
  CHECK(cm.tp == 1);
  CHECK(cm.fn == 1);
  CHECK(cm.fp == 0);
  CHECK(cm.tn == 2);
  CHECK(cm.total() == 4);

  const ConfusionMatrix perfect = confusion(t, t, 1);
  CHECK(perfect.fp == 0);
  CHECK(perfect.fn == 0);

  CHECK_THROWS_AS(confusion(t, std::vector<int>{1}, 1), LengthMismatch);
  CHECK_THROWS_AS(confusion(std::vector<int>{}, std::vector<int>{}, 1), EmptyInput);
}

TEST_CASE("confusion: matches the tally oracle on random pairs") {
  Rng rng(404);
  std::vector<int> t(1000), p(1000);
  for (int i = 0; i < 1000; ++i) {
    t[static_cast<std::size_t>(i)] = static_cast<int>(rng.next_below(2));
    p[static_cast<std::size_t>(i)] = static_cast<int>(rng.next_below(2));
  }
  for (int positive = 0; positive <= 1; ++positive) {
    const ConfusionMatrix cm = confusion(t, p, positive);
    const oracle::Tally want = oracle::tally_confusion(t, p, positive);
    CHECK(cm.tp == want.tp);
    CHECK(cm.fp == want.fp);
    CHECK(cm.fn == want.fn);
    CHECK(cm.tn == want.tn);
  }
}

TEST_CASE("swapping the positive class transposes the matrix, accuracy unchanged") {
  Rng rng(11);
  std::vector<int> t(200), p(200);
  for (int i = 0; i < 200; ++i) {
    t[static_cast<std::size_t>(i)] = static_cast<int>(rng.next_below(2));
    p[static_cast<std::size_t>(i)] = static_cast<int>(rng.next_below(2));
  }
  const ConfusionMatrix a = confusion(t, p, 1);
  const ConfusionMatrix b = confusion(t, p, 0);
  CHECK(a.tp == b.tn);
  CHECK(a.fp == b.fn);
  CHECK(a.fn == b.fp);
  CHECK(a.tn == b.tp);
  CHECK(accuracy(a) == accuracy(b));
}

TEST_CASE("precision and recall conventions") {
  ConfusionMatrix cm;
  cm.tp = 1;
  cm.fp = 0;
  cm.fn = 0;
  cm.tn = 3;
  CHECK(precision(cm).value == 1.0);
  CHECK(precision(cm).defined);
  CHECK(recall(cm).value == 1.0);

  ConfusionMatrix none;
  none.tn = 4;
  const Rate p = precision(none);
  CHECK(p.value == 0.0);
  CHECK_FALSE(p.defined);  // tp+fp == 0: undefined, flagged not thrown
  const Rate r = recall(none);
  CHECK(r.value == 0.0);
  CHECK_FALSE(r.defined);

  ConfusionMatrix misses;
  misses.fn = 5;
  CHECK(recall(misses).value == 0.0);
  CHECK(recall(misses).defined);
}

TEST_CASE("f1: identities and the published rounding") {
  CHECK(f1(1.0, 1.0) == 1.0);
  CHECK(f1(1.0, 0.0) == 0.0);
  CHECK(f1(0.0, 0.0) == 0.0);

  // 2*0.9974*0.9938 / (0.9974+0.9938) rounds to 0.9956 at 4 decimals.
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.4f", f1(0.9974, 0.9938));
  CHECK(std::string(buf) == "0.9956");

  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const double p = rng.next_real();
    const double r = rng.next_real();
    CHECK(f1(p, r) == f1(r, p));  // harmonic-mean symmetry
    if (p > 0.0 && r > 0.0) {
      CHECK(f1(p, r) <= std::max(p, r) + 1e-15);
      CHECK(f1(p, r) >= std::min(p, r) - 1e-15);
    }
  }
}

TEST_CASE("accuracy: definitional cases") {
  ConfusionMatrix even;
  even.tp = even.tn = even.fp = even.fn = 1;
  CHECK(accuracy(even) == 0.5);
  ConfusionMatrix perfect;
  perfect.tp = 3;
  perfect.tn = 1;
  CHECK(accuracy(perfect) == 1.0);
  ConfusionMatrix empty;
  CHECK_THROWS_AS(accuracy(empty), EmptyInput);
}

TEST_CASE("make_report: per-class rows and headline agree") {
  const std::vector<int> t{0, 0, 0, 1, 1, 1, 1, 1};
  const std::vector<int> p{0, 0, 1, 1, 1, 1, 1, 0};
  const MetricsReport rep = make_report(t, p, 0);
  CHECK(rep.per_class[0].support == 3);
  CHECK(rep.per_class[1].support == 5);
  CHECK(rep.accuracy == doctest::Approx(6.0 / 8.0));
  CHECK(rep.precision.value == rep.per_class[0].precision.value);
  CHECK(rep.recall.value == rep.per_class[0].recall.value);
  const std::string kv = rep.to_kv();
  CHECK(kv.find("metrics.class.1.support=5") != std::string::npos);
  CHECK(rep.to_text().find("accuracy") != std::string::npos);
}

TEST_CASE("pr_curve: separation, flat scores and endpoints") {
  // Perfect separation: some point reaches precision 1, recall 1.
  const std::vector<int> t{0, 0, 1, 1};
  const std::vector<double> s{0.1, 0.2, 0.8, 0.9};
  const PrCurve curve = pr_curve(t, s, 1);
  bool perfect_point = false;
  for (const PrPoint& p : curve.points)
    if (p.precision == 1.0 && p.recall == 1.0) perfect_point = true;
  CHECK(perfect_point);

  // Endpoints: lowest threshold keeps everything (recall 1), highest keeps
  // nothing (recall 0, precision undefined).
  CHECK(curve.points.front().recall == 1.0);
  CHECK(curve.points.back().recall == 0.0);
  CHECK_FALSE(curve.points.back().precision_defined);

  // All scores equal: one interior point with recall 1, precision = base rate.
  const std::vector<double> flat{0.4, 0.4, 0.4, 0.4};
  const PrCurve fc = pr_curve(t, flat, 1);
  REQUIRE(fc.points.size() == 3);
  CHECK(fc.points[1].threshold == 0.4);
  CHECK(fc.points[1].recall == 1.0);
  CHECK(fc.points[1].precision == 0.5);

  CHECK_THROWS_AS(pr_curve(t, std::vector<double>{0.5}, 1), LengthMismatch);
  CHECK_THROWS_AS(
      pr_curve(std::vector<int>{1, 1}, std::vector<double>{0.5, 0.6}, 1),
      SingleClassTruth);
}

TEST_CASE("pr_curve: every point matches brute-force confusion at its threshold") {
  Rng rng(88);
  std::vector<int> t(50);
  std::vector<double> s(50);
  for (int i = 0; i < 50; ++i) {
    t[static_cast<std::size_t>(i)] = static_cast<int>(rng.next_below(2));
    // Coarse scores so duplicate values occur.
    s[static_cast<std::size_t>(i)] = static_cast<double>(rng.next_int(0, 9)) / 10.0;
  }
  const PrCurve curve = pr_curve(t, s, 1);
  REQUIRE(curve.points.size() >= 3);
  double prev_threshold = -1e300;
  double prev_recall = 2.0;
  for (const PrPoint& p : curve.points) {
    const auto [want_precision, want_recall] = oracle::pr_at_threshold(t, s, p.threshold, 1);
    if (p.precision_defined)
      CHECK(p.precision == doctest::Approx(want_precision).epsilon(1e-12));
    CHECK(p.recall == doctest::Approx(want_recall).epsilon(1e-12));
    CHECK(p.threshold > prev_threshold);  // strictly increasing
    CHECK(p.recall <= prev_recall + 1e-15);  // non-increasing
    prev_threshold = p.threshold;
    prev_recall = p.recall;
  }
  CHECK(curve.to_csv().find("threshold,precision,recall") != std::string::npos);
}

TEST_CASE("pearson: diagonal, affine columns and the two-pass oracle") {
  Rng rng(14);
  Matrix X(10, 3);
  for (int i = 0; i < 10; ++i) {
    X(i, 0) = rng.next_real() * 5.0;
    X(i, 1) = 2.0 * X(i, 0) + 3.0;  // perfectly correlated with column 0
    X(i, 2) = rng.next_real();
  }
  const CorrelationMatrix corr = pearson_corr_matrix(X);
  for (int j = 0; j < 3; ++j) CHECK(corr.r(j, j) == 1.0);
  CHECK(corr.r(0, 1) == doctest::Approx(1.0).epsilon(1e-12));

  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      if (a == b) continue;
      CHECK(corr.r(a, b) ==
            doctest::Approx(oracle::pearson_two_pass(X, a, b)).epsilon(1e-12));
      CHECK(corr.r(a, b) == corr.r(b, a));  // exact symmetry
      CHECK(corr.r(a, b) >= -1.0);
      CHECK(corr.r(a, b) <= 1.0);
    }
}

TEST_CASE("pearson: constant columns are flagged, emitted as zero") {
  Matrix X(5, 2);
  for (int i = 0; i < 5; ++i) {
    X(i, 0) = i;
    X(i, 1) = 42.0;
  }
  const CorrelationMatrix corr = pearson_corr_matrix(X);
  CHECK(corr.column_defined[0]);
  CHECK_FALSE(corr.column_defined[1]);
  CHECK(corr.r(0, 1) == 0.0);
  CHECK(corr.r(1, 1) == 0.0);
  CHECK(corr.r(0, 0) == 1.0);

  Matrix tiny(1, 2);
  tiny.setZero();
  CHECK_THROWS_AS(pearson_corr_matrix(tiny), TooFewSamples);

  const std::string csv = corr.to_csv({"a", "b"});
  CHECK(csv.find("column,a,b") != std::string::npos);
}

}  // TEST_SUITE
