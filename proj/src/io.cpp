#include "kzqfi/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "kzqfi/errors.hpp"

namespace kzqfi::io {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw NumericalError("format_double failed");
  return std::string(buf, ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InvalidInputError("parse_double: bad number '" + s + "'");
  return v;
}

std::size_t CsvTable::column_index(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end())
    throw InvalidInputError("csv: missing column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

bool CsvTable::has_column(const std::string& name) const {
  return std::find(columns.begin(), columns.end(), name) != columns.end();
}

namespace {

bool needs_quoting(const std::string& v) {
  return v.find_first_of(",\"\n\r") != std::string::npos;
}

std::string csv_quote(const std::string& v) {
  if (!needs_quoting(v)) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

CsvWriter::CsvWriter(std::vector<std::string> columns)
    : n_columns_(columns.size()) {
  if (columns.empty()) throw InvalidArgumentError("csv: no columns");
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out_ += ',';
    out_ += csv_quote(columns[i]);
  }
  out_ += '\n';
}

CsvWriter& CsvWriter::cell(const std::string& v) {
  if (in_row_ >= n_columns_) throw InvalidArgumentError("csv: row overflow");
  if (in_row_) out_ += ',';
  out_ += csv_quote(v);
  ++in_row_;
  return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_double(v)); }

CsvWriter& CsvWriter::cell(std::size_t v) { return cell(std::to_string(v)); }

void CsvWriter::end_row() {
  if (in_row_ != n_columns_) throw InvalidArgumentError("csv: incomplete row");
  out_ += '\n';
  in_row_ = 0;
}

void CsvWriter::raw_row(const std::string& line) {
  if (in_row_ != 0) throw InvalidArgumentError("csv: raw_row inside a row");
  out_ += line;
  if (line.empty() || line.back() != '\n') out_ += '\n';
}

std::string CsvWriter::str() const {
  if (in_row_ != 0) throw InvalidArgumentError("csv: unterminated row");
  return out_;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool any = false;

  auto end_field = [&]() {
    row.push_back(field);
    field.clear();
  };
  auto end_row = [&]() {
    end_field();
    if (!any) {
      table.columns = row;
      any = true;
    } else {
      if (row.size() != table.columns.size())
        throw InvalidInputError("csv: ragged row");
      table.rows.push_back(row);
    }
    row.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      end_row();
    } else if (c != '\r') {
      field += c;
    }
  }
  if (in_quotes) throw InvalidInputError("csv: unterminated quote");
  if (!field.empty() || !row.empty()) end_row();
  if (!any) throw InvalidInputError("csv: empty input");
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  return parse_csv(read_text(path));
}

namespace {

std::string digest_hex(const unsigned char* d, unsigned len) {
  static const char* hexd = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out += hexd[d[i] >> 4];
    out += hexd[d[i] & 0xf];
  }
  return out;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1)
    throw NumericalError("sha256 failed");
  return digest_hex(digest, len);
}

std::string sha256_file_hex(const std::filesystem::path& path) {
  return sha256_hex(read_text(path));
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw InvalidInputError("read failed: " + path.string());
  return std::move(ss).str();
}

void write_text_atomic(const std::filesystem::path& path,
                       std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInputError("cannot open " + tmp.string());
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    if (!out) throw InvalidInputError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInputError("json parse error in " + path.string() + ": " +
                            e.what());
  }
}

void write_json_file(const std::filesystem::path& path,
                     const nlohmann::json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

}  // namespace kzqfi::io
