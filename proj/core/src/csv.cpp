#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <unordered_set>

#include "idsgan/data.hpp"
#include "idsgan/errors.hpp"

namespace idsgan::data {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Splits one record on commas; double-quoted fields may contain commas and
// "" escapes.
std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

}  // namespace

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view cell) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

std::optional<std::size_t> RawTable::find_column(std::string_view name) const {
  const std::string wanted = lower(trim(name));
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (lower(trim(columns[i])) == wanted) return i;
  }
  return std::nullopt;
}

RawTable parse_csv(std::istream& in, bool has_header, const std::string& source) {
  RawTable table;
  std::string line;
  std::size_t line_no = 0;
  std::size_t arity = 0;
  bool have_arity = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto cells = split_record(line);
    if (!have_arity) {
      arity = cells.size();
      have_arity = true;
      if (has_header) {
        table.columns = std::move(cells);
        continue;
      }
      table.columns.reserve(arity);
      for (std::size_t i = 0; i < arity; ++i) table.columns.push_back("c" + std::to_string(i));
    }
    if (cells.size() != arity) {
      throw ParseError(source + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(arity) + " fields, found " + std::to_string(cells.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (!have_arity) throw ParseError(source + ": empty input");
  return table;
}

RawTable load_csv(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return parse_csv(in, has_header, path.string());
}

void append_rows(RawTable& table, RawTable more) {
  if (table.columns.empty() && table.rows.empty()) {
    table = std::move(more);
    return;
  }
  if (more.columns.size() != table.columns.size()) {
    throw ParseError("cannot concatenate tables with " + std::to_string(table.columns.size()) +
                     " and " + std::to_string(more.columns.size()) + " columns");
  }
  table.rows.insert(table.rows.end(), std::make_move_iterator(more.rows.begin()),
                    std::make_move_iterator(more.rows.end()));
}

RawTable dedupe(const RawTable& table) {
  RawTable out;
  out.columns = table.columns;
  std::unordered_set<std::string> seen;
  seen.reserve(table.rows.size());
  std::string key;
  for (const auto& row : table.rows) {
    key.clear();
    for (const auto& cell : row) {
      key += cell;
      key.push_back('\x1f');
    }
    if (seen.insert(key).second) out.rows.push_back(row);
  }
  return out;
}

}  // namespace idsgan::data
