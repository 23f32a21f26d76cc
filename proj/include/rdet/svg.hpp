#pragma once

#include <string>
#include <vector>

#include "rdet/metrics.hpp"
#include "rdet/types.hpp"

namespace rdet {

// Standalone SVG renderings of the evaluation artifacts. The CSV point lists
// are the canonical outputs; these are convenience figures with no plotting
// dependency.

std::string pr_curve_svg(const PrCurve& curve, const std::string& title);
std::string confusion_svg(const ConfusionMatrix& cm, const std::string& title);
std::string heatmap_svg(const Matrix& values, const std::vector<std::string>& names,
                        const std::string& title);

}  // namespace rdet
