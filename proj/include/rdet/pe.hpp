#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rdet/schema.hpp"
#include "rdet/types.hpp"

namespace rdet {

/// Header-level facts read from a Portable Executable image. Directory RVAs
/// and sizes are zero whenever the corresponding data-directory entry is
/// absent.
struct PeHeaderSummary {
  std::uint16_t machine = 0;
  std::uint16_t number_of_sections = 0;
  std::uint8_t major_linker_version = 0;
  std::uint8_t minor_linker_version = 0;
  std::uint16_t major_image_version = 0;
  std::uint16_t major_os_version = 0;
  std::uint64_t size_of_stack_reserve = 0;
  std::uint16_t dll_characteristics = 0;
  std::uint32_t export_rva = 0;
  std::uint32_t export_size = 0;
  std::uint32_t debug_rva = 0;
  std::uint32_t debug_size = 0;
  std::uint32_t iat_rva = 0;
  std::uint32_t resource_size = 0;
  std::uint64_t bitcoin_address_count = 0;
};

/// Parses DOS header, PE signature, COFF header, optional header (PE32 or
/// PE32+) and the export/resource/debug/IAT data directories, and counts
/// Base58 runs over the whole input for bitcoin_address_count. Never reads
/// past the input: malformed input raises NotAnExecutable, TruncatedHeader
/// or UnknownOptionalHeaderMagic, never anything else.
PeHeaderSummary parse_pe(std::span<const std::uint8_t> bytes);

/// Non-overlapping runs matching [13][Base58]{25,34}, scanned greedily left
/// to right over the raw bytes.
std::uint64_t count_bitcoin_addresses(std::span<const std::uint8_t> bytes);

/// Features in schema column order; every numeric schema column must map to
/// a summary field or UnmappedColumn is raised.
Vector to_feature_vector(const PeHeaderSummary& summary, const FeatureSchema& schema);

struct HeuristicOptions {
  // "very large" IAT bound. Orders of magnitude above the 4096 seen on
  // legitimate images, below common sentinel values.
  double iat_large_threshold = 268435456.0;  // 2^28
};

struct HeuristicVerdict {
  int label = kLegitimateLabel;
  std::vector<std::string> fired_rules;  // non-empty iff label == malware
};

/// Rule-based baseline from the observed header patterns: any malware-pattern
/// match (zero MajorImageVersion; zero ExportSize and DebugSize; IAT RVA of
/// zero or very large; zero ResourceSize) labels the row malware. Pure
/// function; high recall by construction, documented as a baseline.
HeuristicVerdict baseline_heuristic(FeatureRef features, const FeatureSchema& schema,
                                  const HeuristicOptions& opts = {});

}  // namespace rdet
