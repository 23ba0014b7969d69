#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dyadic {

// Minimal RFC 4180 writer. Doubles use %.10g so files are stable across runs.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  template <class... Args>
  void row(const Args&... fields) {
    bool first = true;
    ((put_sep(first), put(fields)), ...);
    out_ << '\n';
    ++rows_;
  }

  std::size_t rows() const { return rows_; }
  void close();

 private:
  void put_sep(bool& first) {
    if (!first) out_ << ',';
    first = false;
  }
  void put(std::string_view s);
  void put(const std::string& s) { put(std::string_view(s)); }
  void put(const char* s) { put(std::string_view(s)); }
  void put(double v);
  void put(int v) { out_ << v; }
  void put(long v) { out_ << v; }
  void put(long long v) { out_ << v; }
  void put(unsigned long v) { out_ << v; }
  void put(bool v) { out_ << (v ? 1 : 0); }
  void put(const std::optional<double>& v) {
    if (v) put(*v);
  }

  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t rows_ = 0;
};

std::string format_double(double v);

}  // namespace dyadic
