#pragma once

#include "gapcert/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace gapcert {

/// Shortest-precision decimal rendering that round-trips doubles; used for
/// every numeric value in reports and CSV files so reruns are byte-identical.
std::string format_real(Real v);

/// Line-oriented `key = value` report with [section] headers.
class ReportWriter {
 public:
  void comment(const std::string& text);
  void section(const std::string& name);
  void kv(const std::string& key, const std::string& value);
  void kv(const std::string& key, Real value);
  void kv(const std::string& key, bool value);
  void kv(const std::string& key, const Vec& values);

  const std::string& str() const { return text_; }
  void write_to(const std::filesystem::path& path) const;

 private:
  std::string text_;
};

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header);
  void row(const std::vector<Real>& values);
  void raw_row(const std::vector<std::string>& cells);

  const std::string& str() const { return text_; }
  void write_to(const std::filesystem::path& path) const;

 private:
  std::string text_;
  std::size_t columns_ = 0;
};

}  // namespace gapcert
