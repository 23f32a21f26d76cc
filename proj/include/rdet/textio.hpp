#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace rdet {

/// Shortest decimal form that parses back to the exact same double.
std::string fmt_double(double v);

/// Strict full-string parse; throws UnparsableValue on anything else
/// (including trailing garbage, empty input, inf/nan spellings).
double parse_double(std::string_view s);

/// Strict full-string parse of a signed integer.
long long parse_int(std::string_view s);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

/// Splits into lines on '\n', dropping one trailing '\r' per line.
std::vector<std::string_view> split_lines(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

/// Accumulates stable `key=value` lines for machine consumption.
class KvWriter {
 public:
  void add(std::string_view key, std::string_view value);
  void add(std::string_view key, double value);
  void add(std::string_view key, long long value);
  void add(std::string_view key, bool value);
  const std::string& str() const { return out_; }

 private:
  std::string out_;
};

}  // namespace rdet
