#include "infoflow/csv.hpp"

#include <cstdio>

#include "infoflow/errors.hpp"

namespace infoflow {

CsvWriter::CsvWriter(const std::filesystem::path& file,
                     const std::vector<std::string>& columns)
    : out_(file, std::ios::binary) {
  if (!out_) {
    throw Error("cannot open CSV file for writing: " + file.string());
  }
  bool first = true;
  for (const auto& c : columns) {
    if (!first) out_ << ',';
    out_ << c;
    first = false;
  }
  out_ << '\n';
}

std::string CsvWriter::format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void CsvWriter::sep() {
  if (!first_in_row_) out_ << ',';
  first_in_row_ = false;
}

void CsvWriter::put(double v) {
  sep();
  out_ << format_double(v);
}

void CsvWriter::put(std::uint64_t v) {
  sep();
  out_ << v;
}

void CsvWriter::put(std::int64_t v) {
  sep();
  out_ << v;
}

void CsvWriter::put(const std::string& v) {
  sep();
  out_ << v;
}

}  // namespace infoflow
