#include "rdet/pe.hpp"

#include <cstdio>
#include <cstring>

#include "rdet/errors.hpp"

namespace rdet {
namespace {

constexpr std::uint32_t kPe32Magic = 0x10B;
constexpr std::uint32_t kPe32PlusMagic = 0x20B;
constexpr std::size_t kDosHeaderSize = 64;
constexpr std::size_t kElfanewOffset = 0x3C;
constexpr std::size_t kCoffHeaderSize = 20;

// Data directory indices, per the PE format.
constexpr int kDirExport = 0;
constexpr int kDirResource = 2;
constexpr int kDirDebug = 6;
constexpr int kDirIat = 12;

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t size() const { return bytes_.size(); }

  std::uint8_t u8(std::uint64_t off) const {
    check(off, 1);
    return bytes_[off];
  }
  std::uint16_t u16(std::uint64_t off) const { return read<std::uint16_t>(off); }
  std::uint32_t u32(std::uint64_t off) const { return read<std::uint32_t>(off); }
  std::uint64_t u64(std::uint64_t off) const { return read<std::uint64_t>(off); }

 private:
  template <class T>
  T read(std::uint64_t off) const {
    check(off, sizeof(T));
    T v{};
    std::memcpy(&v, bytes_.data() + off, sizeof(T));
    return v;  // little-endian host assumed; PE is little-endian
  }

  void check(std::uint64_t off, std::uint64_t len) const {
    if (off > bytes_.size() || bytes_.size() - off < len)
      throw TruncatedHeader("header field at offset " + std::to_string(off) +
                            " runs past the input (" + std::to_string(bytes_.size()) +
                            " bytes)");
  }

  std::span<const std::uint8_t> bytes_;
};

bool is_base58(std::uint8_t c) {
  if (c >= '1' && c <= '9') return true;
  if (c >= 'A' && c <= 'Z') return c != 'I' && c != 'O';
  if (c >= 'a' && c <= 'z') return c != 'l';
  return false;
}

}  // namespace

std::uint64_t count_bitcoin_addresses(std::span<const std::uint8_t> bytes) {
  std::uint64_t count = 0;
  std::size_t i = 0;
  const std::size_t n = bytes.size();
  while (i < n) {
    if (bytes[i] == '1' || bytes[i] == '3') {
      std::size_t j = i + 1;
      while (j < n && j - (i + 1) < 34 && is_base58(bytes[j])) ++j;
      if (j - (i + 1) >= 25) {
        ++count;
        i = j;
        continue;
      }
    }
    ++i;
  }
  return count;
}

PeHeaderSummary parse_pe(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  if (in.size() < kDosHeaderSize)
    throw TruncatedHeader("input shorter than a DOS header (64 bytes)");
  if (in.u8(0) != 'M' || in.u8(1) != 'Z')
    throw NotAnExecutable("missing MZ signature");

  const std::uint64_t pe_off = in.u32(kElfanewOffset);
  if (in.u8(pe_off) != 'P' || in.u8(pe_off + 1) != 'E' || in.u8(pe_off + 2) != 0 ||
      in.u8(pe_off + 3) != 0)
    throw NotAnExecutable("missing PE signature");

  PeHeaderSummary s;
  const std::uint64_t coff = pe_off + 4;
  s.machine = in.u16(coff);
  s.number_of_sections = in.u16(coff + 2);
  if (s.number_of_sections == 0)
    throw NotAnExecutable("image declares zero sections");

  const std::uint64_t opt = coff + kCoffHeaderSize;
  const std::uint32_t magic = in.u16(opt);
  if (magic != kPe32Magic && magic != kPe32PlusMagic) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "optional header magic 0x%X", magic);
    throw UnknownOptionalHeaderMagic(buf);
  }
  const bool plus = magic == kPe32PlusMagic;

  s.major_linker_version = in.u8(opt + 2);
  s.minor_linker_version = in.u8(opt + 3);
  s.major_os_version = in.u16(opt + 40);
  s.major_image_version = in.u16(opt + 44);
  s.dll_characteristics = in.u16(opt + 70);
  s.size_of_stack_reserve = plus ? in.u64(opt + 72) : in.u32(opt + 72);

  const std::uint64_t n_dirs_off = opt + (plus ? 108 : 92);
  const std::uint64_t dirs = opt + (plus ? 112 : 96);
  std::uint32_t n_dirs = in.u32(n_dirs_off);
  if (n_dirs > 16) n_dirs = 16;

  auto directory = [&](int index, std::uint32_t* rva, std::uint32_t* size) {
    if (static_cast<std::uint32_t>(index) >= n_dirs) return;  // absent -> zeros
    const std::uint64_t off = dirs + 8ull * static_cast<std::uint64_t>(index);
    if (rva) *rva = in.u32(off);
    if (size) *size = in.u32(off + 4);
  };
  directory(kDirExport, &s.export_rva, &s.export_size);
  directory(kDirResource, nullptr, &s.resource_size);
  directory(kDirDebug, &s.debug_rva, &s.debug_size);
  directory(kDirIat, &s.iat_rva, nullptr);

  s.bitcoin_address_count = count_bitcoin_addresses(bytes);
  return s;
}

Vector to_feature_vector(const PeHeaderSummary& s, const FeatureSchema& schema) {
  struct FieldMap {
    const char* column;
    double value;
  };
  const FieldMap fields[] = {
      {"Machine", static_cast<double>(s.machine)},
      {"NumberOfSections", static_cast<double>(s.number_of_sections)},
      {"MajorLinkerVersion", static_cast<double>(s.major_linker_version)},
      {"MinorLinkerVersion", static_cast<double>(s.minor_linker_version)},
      {"MajorImageVersion", static_cast<double>(s.major_image_version)},
      {"MajorOSVersion", static_cast<double>(s.major_os_version)},
      {"SizeOfStackReserve", static_cast<double>(s.size_of_stack_reserve)},
      {"DllCharacteristics", static_cast<double>(s.dll_characteristics)},
      {"ExportRVA", static_cast<double>(s.export_rva)},
      {"ExportSize", static_cast<double>(s.export_size)},
      {"DebugRVA", static_cast<double>(s.debug_rva)},
      {"DebugSize", static_cast<double>(s.debug_size)},
      {"IatRVA", static_cast<double>(s.iat_rva)},
      {"ResourceSize", static_cast<double>(s.resource_size)},
      {"BitcoinAddresses", static_cast<double>(s.bitcoin_address_count)},
  };

  Vector out = Vector::Zero(schema.feature_count());
  std::vector<bool> filled(static_cast<std::size_t>(schema.feature_count()), false);
  for (const FieldMap& f : fields) {
    if (auto idx = schema.feature_index(f.column)) {
      out[*idx] = f.value;
      filled[static_cast<std::size_t>(*idx)] = true;
    }
  }
  const auto& names = schema.feature_names();
  for (std::size_t i = 0; i < filled.size(); ++i)
    if (!filled[i])
      throw UnmappedColumn("schema column '" + names[i] +
                           "' has no PE header counterpart");
  return out;
}

HeuristicVerdict baseline_heuristic(FeatureRef features, const FeatureSchema& schema,
                                  const HeuristicOptions& opts) {
  auto value_of = [&](const char* name) {
    auto idx = schema.feature_index(name);
    if (!idx) throw UnmappedColumn(std::string("heuristic needs column ") + name);
    return features[*idx];
  };
  const double major_image = value_of("MajorImageVersion");
  const double export_size = value_of("ExportSize");
  const double debug_size = value_of("DebugSize");
  const double iat_rva = value_of("IatRVA");
  const double resource_size = value_of("ResourceSize");

  HeuristicVerdict v;
  if (major_image == 0.0) v.fired_rules.push_back("major_image_version_zero");
  if (export_size == 0.0 && debug_size == 0.0)
    v.fired_rules.push_back("export_and_debug_size_zero");
  if (iat_rva == 0.0) v.fired_rules.push_back("iat_rva_zero");
  if (iat_rva > opts.iat_large_threshold) v.fired_rules.push_back("iat_rva_very_large");
  if (resource_size == 0.0) v.fired_rules.push_back("resource_size_zero");
  v.label = v.fired_rules.empty() ? kLegitimateLabel : kMalwareLabel;
  return v;
}

}  // namespace rdet
