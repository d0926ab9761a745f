#include "shelter/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "shelter/error.hpp"

namespace shelter::csv {

namespace {

// RFC 4180 field splitting for a single physical line ("" escapes a quote).
std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw std::invalid_argument("unterminated quoted field");
  return fields;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Table Table::parse(const std::string& text, const std::string& source) {
  Table t;
  t.source_ = source;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    try {
      fields = split_line(line);
    } catch (const std::invalid_argument& e) {
      throw InvalidInput(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
    for (auto& f : fields) f = trim(f);
    if (first) {
      t.header_ = fields;
      for (std::size_t i = 0; i < fields.size(); ++i) t.index_[fields[i]] = i;
      first = false;
      continue;
    }
    if (fields.size() > t.header_.size()) {
      throw InvalidInput(source + ":" + std::to_string(lineno) + ": more fields than header columns");
    }
    fields.resize(t.header_.size());
    t.rows_.push_back(std::move(fields));
  }
  if (first) throw InvalidInput(source + ": missing header row");
  return t;
}

Table Table::load(const std::string& path) { return parse(read_file(path), path); }

const std::string& Table::at(std::size_t row, const std::string& column) const {
  const auto it = index_.find(column);
  if (it == index_.end()) throw InvalidInput(source_ + ": missing column '" + column + "'");
  return rows_.at(row)[it->second];
}

std::string Table::get(std::size_t row, const std::string& column) const {
  const auto it = index_.find(column);
  if (it == index_.end()) return {};
  return rows_.at(row)[it->second];
}

std::optional<double> Table::number(std::size_t row, const std::string& column) const {
  const std::string s = get(row, column);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidInput(source_ + ": row " + std::to_string(row + 1) + " column '" + column +
                       "' is not a number: '" + s + "'");
  }
  return v;
}

double Table::required_number(std::size_t row, const std::string& column) const {
  const auto v = number(row, column);
  if (!v) throw InvalidInput(source_ + ": row " + std::to_string(row + 1) + " column '" + column + "' is empty");
  return *v;
}

void Table::require(const std::vector<std::string>& columns) const {
  for (const auto& c : columns) {
    if (!has_column(c)) throw InvalidInput(source_ + ": missing column '" + c + "'");
  }
}

std::string escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace shelter::csv
