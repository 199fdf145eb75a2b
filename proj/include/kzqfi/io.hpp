#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace kzqfi::io {

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);
double parse_double(const std::string& s);

/// Minimal CSV (RFC-4180-ish: quoting only when needed, UTF-8, '.' decimals).
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column_index(const std::string& name) const;  // throws if absent
  bool has_column(const std::string& name) const;
};

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);

  CsvWriter& cell(const std::string& v);
  CsvWriter& cell(double v);
  CsvWriter& cell(std::size_t v);
  void end_row();

  /// Appends an already-formatted CSV row (used when merging per-run files);
  /// must not be called mid-row.
  void raw_row(const std::string& line);

  /// Full file contents (header + rows); rows must be complete.
  std::string str() const;

 private:
  std::size_t n_columns_;
  std::string out_;
  std::size_t in_row_ = 0;
};

CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(const std::string& text);

std::string sha256_hex(std::string_view data);
std::string sha256_file_hex(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
/// Write-to-temp + rename so readers never observe partial files.
void write_text_atomic(const std::filesystem::path& path,
                       std::string_view content);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path,
                     const nlohmann::json& j);

}  // namespace kzqfi::io
