#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace shelter::csv {

// Header-addressed CSV table. Fields may be double-quoted (WKT geometry
// carries commas). A header row is required.
class Table {
 public:
  static Table parse(const std::string& text, const std::string& source = "<memory>");
  static Table load(const std::string& path);

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }
  bool has_column(const std::string& name) const { return index_.contains(name); }

  // Throws InvalidInput for unknown required columns.
  const std::string& at(std::size_t row, const std::string& column) const;
  // Empty string when the column is absent or the cell is blank.
  std::string get(std::size_t row, const std::string& column) const;
  std::optional<double> number(std::size_t row, const std::string& column) const;
  double required_number(std::size_t row, const std::string& column) const;

  void require(const std::vector<std::string>& columns) const;
  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::vector<std::string> header_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::string>> rows_;
};

// Quotes a field when it contains a comma, quote or newline.
std::string escape(const std::string& field);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace shelter::csv
