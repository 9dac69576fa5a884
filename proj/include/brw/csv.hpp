#pragma once

#include <charconv>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>

namespace brw {

/// Minimal RFC-4180 writer.  Floating point values use the shortest
/// round-trip representation so outputs are byte-stable across runs.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  template <typename... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((write_separator(first), write_field(fields)), ...);
    out_ << "\r\n";
  }

  static std::string quote(std::string_view field);
  static std::string format(double value);

 private:
  void write_separator(bool& first) {
    if (!first) out_ << ',';
    first = false;
  }
  void write_field(std::string_view s) { out_ << quote(s); }
  void write_field(const std::string& s) { out_ << quote(s); }
  void write_field(const char* s) { out_ << quote(s); }
  void write_field(bool b) { out_ << (b ? '1' : '0'); }
  void write_field(double v) { out_ << format(v); }
  template <typename Int>
    requires std::is_integral_v<Int>
  void write_field(Int v) {
    out_ << v;
  }

  std::ostream& out_;
};

inline std::string CsvWriter::quote(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

inline std::string CsvWriter::format(double value) {
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

}  // namespace brw
