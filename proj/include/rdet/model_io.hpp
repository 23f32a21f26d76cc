#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rdet/forest.hpp"
#include "rdet/gbdt.hpp"
#include "rdet/pe.hpp"

namespace rdet {

/// The rule-based baseline packaged like a trained model so every CLI path
/// (evaluate, predict, scan) treats the three kinds uniformly.
struct HeuristicModel {
  HeuristicOptions options;
};

/// Versioned model container. Serialized as structured text with an explicit
/// format version, a SHA-256 checksum of the payload, decimal-lossless reals
/// and the training parameters echoed verbatim, so identical training runs
/// produce byte-identical files.
struct SavedModel {
  int format_version = 1;
  std::variant<GbdtModel, ForestModel, HeuristicModel> model;
  std::vector<std::string> feature_names;  // training schema's numeric columns
  std::string dataset_sha256 = "-";        // fingerprint of canonicalized CSV bytes
  std::string trained_at = "-";            // set only when explicitly stamped
  std::vector<std::pair<std::string, double>> metric_summary;

  std::string kind() const;
  int n_features() const { return static_cast<int>(feature_names.size()); }
};

std::string save_model(const SavedModel& m);
SavedModel load_model(std::string_view bytes);  // UnsupportedVersion, CorruptModelFile
void save_model_file(const SavedModel& m, const std::filesystem::path& path);
SavedModel load_model_file(const std::filesystem::path& path);

/// Score of the requested positive class in [0,1]. The schema is only
/// consulted by the heuristic kind (column lookup).
double positive_score(const SavedModel& m, FeatureRef x, int positive,
                      const FeatureSchema& schema);

/// Hard label in {0,1}; exact-tie scores go to the malware class (the forest
/// kind applies its own configured tie rule).
int predict_label(const SavedModel& m, FeatureRef x, const FeatureSchema& schema);

}  // namespace rdet
