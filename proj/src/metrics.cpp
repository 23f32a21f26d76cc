#include "rdet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rdet/errors.hpp"
#include "rdet/textio.hpp"

namespace rdet {

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred,
                          int positive) {
  if (y_true.size() != y_pred.size())
    throw LengthMismatch("y_true and y_pred differ in length");
  if (y_true.empty()) throw EmptyInput("no samples to evaluate");
  ConfusionMatrix cm;
  cm.positive = positive;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const bool actual = y_true[i] == positive;
    const bool predicted = y_pred[i] == positive;
    if (actual && predicted)
      ++cm.tp;
    else if (!actual && predicted)
      ++cm.fp;
    else if (actual && !predicted)
      ++cm.fn;
    else
      ++cm.tn;
  }
  return cm;
}

Rate precision(const ConfusionMatrix& cm) {
  const long long denom = cm.tp + cm.fp;
  if (denom == 0) return {0.0, false};
  return {static_cast<double>(cm.tp) / static_cast<double>(denom), true};
}

Rate recall(const ConfusionMatrix& cm) {
  const long long denom = cm.tp + cm.fn;
  if (denom == 0) return {0.0, false};
  return {static_cast<double>(cm.tp) / static_cast<double>(denom), true};
}

double f1(double precision, double recall) {
  const double denom = precision + recall;
  if (denom == 0.0) return 0.0;
  return 2.0 * precision * recall / denom;
}

double accuracy(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw EmptyInput("confusion matrix is empty");
  return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
}

MetricsReport make_report(std::span<const int> y_true, std::span<const int> y_pred,
                          int positive) {
  MetricsReport rep;
  rep.positive = positive;
  rep.cm = confusion(y_true, y_pred, positive);
  rep.accuracy = accuracy(rep.cm);
  rep.precision = precision(rep.cm);
  rep.recall = recall(rep.cm);
  rep.f1 = f1(rep.precision.value, rep.recall.value);
  for (int label = 0; label < 2; ++label) {
    const ConfusionMatrix cm = confusion(y_true, y_pred, label);
    ClassMetrics& c = rep.per_class[static_cast<std::size_t>(label)];
    c.label = label;
    c.precision = rdet::precision(cm);
    c.recall = rdet::recall(cm);
    c.f1 = rdet::f1(c.precision.value, c.recall.value);
    c.support = cm.tp + cm.fn;
  }
  return rep;
}

std::string MetricsReport::to_kv() const {
  KvWriter kv;
  kv.add("metrics.positive", static_cast<long long>(positive));
  kv.add("metrics.accuracy", accuracy);
  kv.add("metrics.precision", precision.value);
  kv.add("metrics.precision_defined", precision.defined);
  kv.add("metrics.recall", recall.value);
  kv.add("metrics.recall_defined", recall.defined);
  kv.add("metrics.f1", f1);
  for (const ClassMetrics& c : per_class) {
    const std::string p = "metrics.class." + std::to_string(c.label) + ".";
    kv.add(p + "precision", c.precision.value);
    kv.add(p + "recall", c.recall.value);
    kv.add(p + "f1", c.f1);
    kv.add(p + "support", c.support);
  }
  kv.add("confusion.positive", static_cast<long long>(cm.positive));
  kv.add("confusion.tp", cm.tp);
  kv.add("confusion.fp", cm.fp);
  kv.add("confusion.fn", cm.fn);
  kv.add("confusion.tn", cm.tn);
  return kv.str();
}

std::string MetricsReport::to_text() const {
  char buf[160];
  std::string out;
  std::snprintf(buf, sizeof(buf), "positive class: %d (%s); labels: %s\n\n", positive,
                positive == kMalwareLabel ? "malware" : "legitimate", kLabelConvention);
  out += buf;
  out += "                precision    recall  f1-score   support\n\n";
  static const char* kNames[2] = {"malware (0)", "legitimate (1)"};
  for (const ClassMetrics& c : per_class) {
    std::snprintf(buf, sizeof(buf), "%14s   %9.4f %9.4f %9.4f %9lld\n",
                  kNames[static_cast<std::size_t>(c.label)], c.precision.value,
                  c.recall.value, c.f1, c.support);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "\n%14s   %9s %9s %9.4f %9lld\n", "accuracy", "", "",
                accuracy, cm.total());
  out += buf;
  return out;
}

PrCurve pr_curve(std::span<const int> y_true, std::span<const double> scores,
                 int positive) {
  if (y_true.size() != scores.size())
    throw LengthMismatch("y_true and scores differ in length");
  const std::size_t n = y_true.size();
  long long npos = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (y_true[i] == positive) ++npos;
  if (npos == 0 || npos == static_cast<long long>(n))
    throw SingleClassTruth("PR curve needs both classes in y_true");

  // Ascending by score; a threshold t keeps the suffix with score >= t, so a
  // single sweep with a shrinking true-positive count covers every point.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  auto make_point = [&](double threshold, long long kept, long long tp) {
    PrPoint pt;
    pt.threshold = threshold;
    pt.precision_defined = kept > 0;
    pt.precision = kept > 0 ? static_cast<double>(tp) / static_cast<double>(kept) : 0.0;
    pt.recall = static_cast<double>(tp) / static_cast<double>(npos);
    return pt;
  };

  const double lo = scores[order.front()];
  const double hi = scores[order.back()];
  auto below = [](double v) {
    double b = v - 1.0;
    return b < v ? b : std::nextafter(v, -1.0 / 0.0);
  };
  auto above = [](double v) {
    double a = v + 1.0;
    return a > v ? a : std::nextafter(v, 1.0 / 0.0);
  };

  PrCurve curve;
  curve.points.push_back(make_point(below(lo), static_cast<long long>(n), npos));
  long long tp_suffix = npos;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 || scores[order[i]] != scores[order[i - 1]])
      curve.points.push_back(
          make_point(scores[order[i]], static_cast<long long>(n - i), tp_suffix));
    if (y_true[order[i]] == positive) --tp_suffix;
  }
  curve.points.push_back(make_point(above(hi), 0, 0));
  return curve;
}

std::string PrCurve::to_csv() const {
  std::string out = "threshold,precision,recall,precision_defined\n";
  for (const PrPoint& p : points) {
    out += fmt_double(p.threshold);
    out.push_back(',');
    out += fmt_double(p.precision);
    out.push_back(',');
    out += fmt_double(p.recall);
    out.push_back(',');
    out += p.precision_defined ? "1" : "0";
    out.push_back('\n');
  }
  return out;
}

CorrelationMatrix pearson_corr_matrix(const Matrix& features) {
  const Eigen::Index n = features.rows();
  const Eigen::Index d = features.cols();
  if (n < 2) throw TooFewSamples("correlation needs at least 2 samples");

  const Matrix centered = features.rowwise() - features.colwise().mean();
  const Matrix cov = centered.transpose() * centered / static_cast<double>(n - 1);

  CorrelationMatrix out;
  out.r = Matrix::Zero(d, d);
  out.column_defined.resize(static_cast<std::size_t>(d));
  Vector sd(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    sd[j] = std::sqrt(cov(j, j));
    out.column_defined[static_cast<std::size_t>(j)] = sd[j] > 0.0;
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i; j < d; ++j) {
      double v = 0.0;
      if (out.column_defined[static_cast<std::size_t>(i)] &&
          out.column_defined[static_cast<std::size_t>(j)]) {
        v = i == j ? 1.0 : cov(i, j) / (sd[i] * sd[j]);
        v = std::clamp(v, -1.0, 1.0);
      }
      out.r(i, j) = v;
      out.r(j, i) = v;
    }
  }
  return out;
}

std::string CorrelationMatrix::to_csv(const std::vector<std::string>& names) const {
  std::string out = "column";
  for (const std::string& n : names) {
    out.push_back(',');
    out += n;
  }
  out.push_back('\n');
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    out += names[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < r.cols(); ++j) {
      out.push_back(',');
      out += fmt_double(r(i, j));
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace rdet
