#pragma once

#include <string>
#include <string_view>

namespace rdet {

std::string sha256_hex(std::string_view bytes);
std::string md5_hex(std::string_view bytes);

/// Normalizes CSV bytes before fingerprinting: CRLF -> LF and exactly one
/// trailing newline, so the same logical file hashes identically across
/// platforms and editors.
std::string canonicalize_csv_bytes(std::string_view bytes);

}  // namespace rdet
