#include "dyadic/csv.hpp"

#include <cmath>
#include <cstdio>

#include "dyadic/error.hpp"

namespace dyadic {

std::string format_double(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v == 0.0 ? 0.0 : v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary) {
  if (!out_) throw Error(Errc::Io, "cannot write " + path.string());
  bool first = true;
  for (const auto& h : header) {
    put_sep(first);
    put(std::string_view(h));
  }
  out_ << '\n';
}

void CsvWriter::put(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) {
    out_ << s;
    return;
  }
  out_ << '"';
  for (char c : s) {
    if (c == '"') out_ << '"';
    out_ << c;
  }
  out_ << '"';
}

void CsvWriter::put(double v) { out_ << format_double(v); }

void CsvWriter::close() {
  out_.close();
  if (!out_) throw Error(Errc::Io, "failed writing " + path_.string());
}

}  // namespace dyadic
