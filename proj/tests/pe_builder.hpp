// Assembles minimal Portable Executable images byte by byte, straight from
// the published header layout. The parser must read back every field this
// writer lays down; keeping the two independent is the point of the
// round-trip tests.
#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "rdet/pe.hpp"

namespace pebuild {

inline constexpr const char* kSampleAddress = "1BvBMSEYstWetqTFn5Au4m4GFg7xJaNVN2";

struct BuildSpec {
  rdet::PeHeaderSummary fields;
  bool pe32plus = true;
  std::uint32_t n_data_dirs = 16;  // NumberOfRvaAndSizes to declare and emit
};

class ImageWriter {
 public:
  explicit ImageWriter(std::size_t size) : bytes_(size, 0) {}

  void u8(std::size_t off, std::uint8_t v) { bytes_[off] = v; }
  void u16(std::size_t off, std::uint16_t v) { put(off, v); }
  void u32(std::size_t off, std::uint32_t v) { put(off, v); }
  void u64(std::size_t off, std::uint64_t v) { put(off, v); }

  std::vector<std::uint8_t>& bytes() { return bytes_; }

 private:
  template <class T>
  void put(std::size_t off, T v) {
    std::memcpy(bytes_.data() + off, &v, sizeof(T));  // little-endian host
  }

  std::vector<std::uint8_t> bytes_;
};

inline std::vector<std::uint8_t> build_pe(const BuildSpec& spec) {
  const rdet::PeHeaderSummary& f = spec.fields;
  const std::size_t pe_off = 0x80;
  const std::size_t coff = pe_off + 4;
  const std::size_t opt = coff + 20;
  const std::size_t opt_fixed = spec.pe32plus ? 112 : 96;
  const std::size_t opt_size = opt_fixed + 8 * spec.n_data_dirs;
  const std::size_t sections = opt + opt_size;
  const std::size_t section_bytes = 40ull * f.number_of_sections;
  // Overlay: one NUL-separated Base58 address per expected count.
  const std::size_t addr_len = std::strlen(kSampleAddress);
  const std::size_t overlay = (addr_len + 2) * f.bitcoin_address_count;

  ImageWriter w(sections + section_bytes + overlay);

  // DOS header.
  w.u8(0, 'M');
  w.u8(1, 'Z');
  w.u32(0x3C, static_cast<std::uint32_t>(pe_off));

  // Signature + COFF file header.
  w.u8(pe_off, 'P');
  w.u8(pe_off + 1, 'E');
  w.u16(coff + 0, f.machine);
  w.u16(coff + 2, f.number_of_sections);
  w.u16(coff + 16, static_cast<std::uint16_t>(opt_size));
  w.u16(coff + 18, 0x0102);  // EXECUTABLE_IMAGE | 32BIT_MACHINE

  // Optional header.
  w.u16(opt + 0, spec.pe32plus ? 0x20B : 0x10B);
  w.u8(opt + 2, f.major_linker_version);
  w.u8(opt + 3, f.minor_linker_version);
  w.u32(opt + 16, 0x1000);  // entry point
  w.u16(opt + 40, f.major_os_version);
  w.u16(opt + 44, f.major_image_version);
  w.u16(opt + 48, 5);  // subsystem version
  w.u32(opt + 56, 0x5000);  // SizeOfImage
  w.u32(opt + 60, 0x400);   // SizeOfHeaders
  w.u16(opt + 68, 2);       // subsystem: GUI
  w.u16(opt + 70, f.dll_characteristics);
  if (spec.pe32plus) {
    w.u64(opt + 24, 0x140000000ull);  // image base
    w.u64(opt + 72, f.size_of_stack_reserve);
    w.u64(opt + 80, 0x1000);  // stack commit
    w.u64(opt + 88, 0x100000);
    w.u64(opt + 96, 0x1000);
    w.u32(opt + 108, spec.n_data_dirs);
  } else {
    w.u32(opt + 28, 0x400000);
    w.u32(opt + 72, static_cast<std::uint32_t>(f.size_of_stack_reserve));
    w.u32(opt + 76, 0x1000);
    w.u32(opt + 80, 0x100000);
    w.u32(opt + 84, 0x1000);
    w.u32(opt + 92, spec.n_data_dirs);
  }

  const std::size_t dirs = opt + opt_fixed;
  auto dir = [&](std::uint32_t index, std::uint32_t rva, std::uint32_t size) {
    if (index >= spec.n_data_dirs) return;
    w.u32(dirs + 8ull * index, rva);
    w.u32(dirs + 8ull * index + 4, size);
  };
  dir(0, f.export_rva, f.export_size);
  dir(2, f.resource_size ? 0x3000 : 0, f.resource_size);
  dir(6, f.debug_rva, f.debug_size);
  dir(12, f.iat_rva, f.iat_rva ? 0x100 : 0);

  // Section headers: name + plausible geometry, otherwise zero.
  for (std::uint16_t s = 0; s < f.number_of_sections; ++s) {
    const std::size_t off = sections + 40ull * s;
    const std::string name = ".s" + std::to_string(s);
    for (std::size_t i = 0; i < name.size() && i < 8; ++i)
      w.u8(off + i, static_cast<std::uint8_t>(name[i]));
    w.u32(off + 8, 0x1000);                      // VirtualSize
    w.u32(off + 12, 0x1000u * (s + 1));          // VirtualAddress
    w.u32(off + 36, 0x60000020);                 // characteristics
  }

  std::size_t pos = sections + section_bytes;
  for (std::uint64_t a = 0; a < f.bitcoin_address_count; ++a) {
    ++pos;  // leading NUL separator
    for (std::size_t i = 0; i < addr_len; ++i)
      w.u8(pos + i, static_cast<std::uint8_t>(kSampleAddress[i]));
    pos += addr_len + 1;  // trailing NUL
  }
  return w.bytes();
}

}  // namespace pebuild
