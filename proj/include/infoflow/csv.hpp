#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace infoflow {

/// CSV writer with a fixed, locale-free number format: floats are printed
/// with 17 significant digits ('%.17g'), enough to round-trip a double
/// exactly, so reruns with the same seed produce byte-identical files.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& file,
            const std::vector<std::string>& columns);

  template <typename... Ts>
  void row(const Ts&... cells) {
    first_in_row_ = true;
    (put(cells), ...);
    out_ << '\n';
  }

  static std::string format_double(double v);

 private:
  void sep();
  void put(double v);
  void put(std::uint64_t v);
  void put(std::int64_t v);
  void put(int v) { put(static_cast<std::int64_t>(v)); }
  void put(bool v) { put(static_cast<std::int64_t>(v ? 1 : 0)); }
  void put(const std::string& v);
  void put(const char* v) { put(std::string(v)); }

  std::ofstream out_;
  bool first_in_row_ = true;
};

}  // namespace infoflow
