#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace bldiff::harness {

/// Comma-separated table with a header row. Reals are written with 17
/// significant digits, NaN as "nan", and every row ends with the config digest.
class CsvWriter {
 public:
  using Cell = std::variant<double, long long, std::string>;

  CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns,
            std::string digest);

  void row(const std::vector<Cell>& cells);
  const std::filesystem::path& path() const { return path_; }

  static std::string format(double x);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t width_;
  std::string digest_;
};

}  // namespace bldiff::harness
