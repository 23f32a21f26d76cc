#pragma once

#include <Eigen/Core>

namespace rdet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;

// Binds contiguous vectors as well as matrix rows (arbitrary inner stride),
// so callers can pass `X.row(i).transpose()` without a copy.
using FeatureRef = Eigen::Ref<const Eigen::VectorXd, 0, Eigen::InnerStride<>>;

// Label convention used throughout: 0 = malware, 1 = legitimate.
inline constexpr int kMalwareLabel = 0;
inline constexpr int kLegitimateLabel = 1;
inline constexpr const char* kLabelConvention = "legitimate=1, malware=0";

}  // namespace rdet
