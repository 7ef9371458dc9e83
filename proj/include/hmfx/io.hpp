#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace hmfx {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal form; identical input gives identical bytes.
std::string format_double(double v);

/// Writes to a sibling temporary file and renames it into place.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);
void write_json_atomic(const std::filesystem::path& path, const Json& doc);
Json read_json(const std::filesystem::path& path);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(const std::vector<double>& row);
  void add_row(std::vector<std::string> row);
  std::string str() const;
  void write(const std::filesystem::path& path) const { write_text_atomic(path, str()); }
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct NumericCsv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::size_t column(const std::string& name) const;
};

NumericCsv read_numeric_csv(const std::filesystem::path& path);

}  // namespace hmfx
