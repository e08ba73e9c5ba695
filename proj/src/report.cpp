#include "gapcert/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>

namespace gapcert {

std::string format_real(Real v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  // Shortest representation that round-trips.
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void ReportWriter::comment(const std::string& text) { text_ += "# " + text + "\n"; }

void ReportWriter::section(const std::string& name) {
  if (!text_.empty()) text_ += "\n";
  text_ += "[" + name + "]\n";
}

void ReportWriter::kv(const std::string& key, const std::string& value) {
  text_ += key + " = " + value + "\n";
}

void ReportWriter::kv(const std::string& key, Real value) { kv(key, format_real(value)); }

void ReportWriter::kv(const std::string& key, bool value) {
  kv(key, std::string(value ? "true" : "false"));
}

void ReportWriter::kv(const std::string& key, const Vec& values) {
  std::string joined;
  for (Index k = 0; k < values.size(); ++k) {
    if (k) joined += " ";
    joined += format_real(values[k]);
  }
  kv(key, joined);
}

void ReportWriter::write_to(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write report file: " + path.string());
  out << text_;
}

CsvWriter::CsvWriter(const std::vector<std::string>& header) : columns_(header.size()) {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k) text_ += ",";
    text_ += header[k];
  }
  text_ += "\n";
}

void CsvWriter::row(const std::vector<Real>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (Real v : values) cells.push_back(format_real(v));
  raw_row(cells);
}

void CsvWriter::raw_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw InternalError("CsvWriter: column count mismatch");
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) text_ += ",";
    text_ += cells[k];
  }
  text_ += "\n";
}

void CsvWriter::write_to(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write csv file: " + path.string());
  out << text_;
}

}  // namespace gapcert
