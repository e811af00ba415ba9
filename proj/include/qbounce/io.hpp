#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace qbounce {

inline constexpr int kOutputSchemaVersion = 1;

/// Shortest round-trip decimal form of a double (deterministic across runs).
std::string format_number(double value);

/// Plain CSV with a `#`-prefixed header block of key: value lines.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  void add_meta(std::string key, std::string value);
  void add_row(const std::vector<double>& values);

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::string> rows_;
};

/// Writes to `<path>.tmp` then renames over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace qbounce
