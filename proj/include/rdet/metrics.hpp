#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "rdet/types.hpp"

namespace rdet {

struct ConfusionMatrix {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  long long tn = 0;
  int positive = kMalwareLabel;

  long long total() const { return tp + fp + fn + tn; }
};

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred,
                          int positive);

/// A metric value plus whether its denominator was nonzero. Undefined
/// metrics carry the conventional value 0 instead of throwing, so batch
/// reports stay total.
struct Rate {
  double value = 0.0;
  bool defined = true;
};

Rate precision(const ConfusionMatrix& cm);
Rate recall(const ConfusionMatrix& cm);
double f1(double precision, double recall);
double accuracy(const ConfusionMatrix& cm);  // throws EmptyInput when total()==0

struct ClassMetrics {
  int label = 0;
  Rate precision;
  Rate recall;
  double f1 = 0.0;
  long long support = 0;
};

/// Full evaluation of one prediction run: headline metrics for the
/// designated positive class plus both per-class rows, so either reading of
/// a published table is reproducible.
struct MetricsReport {
  int positive = kMalwareLabel;
  double accuracy = 0.0;
  Rate precision;
  Rate recall;
  double f1 = 0.0;
  std::array<ClassMetrics, 2> per_class;  // indexed by label
  ConfusionMatrix cm;

  std::string to_kv() const;
  std::string to_text() const;
};

MetricsReport make_report(std::span<const int> y_true, std::span<const int> y_pred,
                          int positive);

struct PrPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  bool precision_defined = true;
};

/// Threshold sweep of (precision, recall): one point per distinct score plus
/// sentinel extremes. Scores >= threshold predict positive, so recall is
/// non-increasing and thresholds strictly increasing.
struct PrCurve {
  std::vector<PrPoint> points;
  std::string to_csv() const;
};

PrCurve pr_curve(std::span<const int> y_true, std::span<const double> scores,
                 int positive);

/// Pearson correlations between feature columns. Entries touching a
/// constant column are undefined and emitted as 0 with defined=false; the
/// matrix is exactly symmetric and clamped to [-1,1].
struct CorrelationMatrix {
  Matrix r;
  std::vector<bool> column_defined;  // per feature column: nonzero variance

  std::string to_csv(const std::vector<std::string>& names) const;
};

CorrelationMatrix pearson_corr_matrix(const Matrix& features);

}  // namespace rdet
