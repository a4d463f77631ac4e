#include "bldiff/harness/csv.hpp"

#include <cmath>
#include <cstdio>

#include "bldiff/errors.hpp"

namespace bldiff::harness {

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns,
                     std::string digest)
    : path_(path), width_(columns.size()), digest_(std::move(digest)) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::trunc);
  if (!out_) throw ConfigError("output: cannot write " + path.string());
  for (const auto& c : columns) out_ << c << ',';
  out_ << "config_digest\n";
}

std::string CsvWriter::format(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void CsvWriter::row(const std::vector<Cell>& cells) {
  if (cells.size() != width_) throw std::logic_error("csv row width mismatch");
  for (const auto& c : cells) {
    if (const auto* d = std::get_if<double>(&c)) {
      out_ << format(*d);
    } else if (const auto* i = std::get_if<long long>(&c)) {
      out_ << *i;
    } else {
      out_ << std::get<std::string>(c);
    }
    out_ << ',';
  }
  out_ << digest_ << '\n';
}

}  // namespace bldiff::harness
