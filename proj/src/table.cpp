#include "smoothforge/table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "smoothforge/error.hpp"

namespace smoothforge {

std::size_t DataTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  throw Error(ErrorKind::user, "variable " + name + " not found");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_row(std::string_view line, std::size_t line_no) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw Error(ErrorKind::user, "unterminated quote on CSV line " + std::to_string(line_no));
  cells.emplace_back(trim(cur));
  return cells;
}

double parse_cell(std::string_view cell, std::size_t line_no, const std::string& column) {
  if (cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan") return std::numeric_limits<double>::quiet_NaN();
  const char* first = cell.data();
  if (*first == '+') ++first;
  double v = 0;
  const auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw Error(ErrorKind::user, "non-numeric value '" + std::string(cell) + "' in column " + column + " on CSV line " +
                                     std::to_string(line_no));
  }
  return v;
}

}  // namespace

DataTable parse_csv(std::string_view text) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  DataTable table;
  std::size_t line_no = 0;
  bool header = true;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_row(line, line_no);
    if (header) {
      table.names = std::move(cells);
      table.columns.resize(table.names.size());
      header = false;
      continue;
    }
    if (cells.size() != table.names.size()) {
      throw Error(ErrorKind::user, "CSV line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                                       " fields, header has " + std::to_string(table.names.size()));
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      table.columns[j].push_back(parse_cell(cells[j], line_no, table.names[j]));
    }
  }
  if (header) throw Error(ErrorKind::user, "CSV input has no header row");
  return table;
}

DataTable read_csv(const std::filesystem::path& path) { return parse_csv(read_file(path)); }

DataTable drop_missing(const DataTable& table, const std::vector<std::size_t>& used, std::size_t& dropped) {
  DataTable out;
  out.names = table.names;
  out.columns.resize(table.columns.size());
  dropped = 0;
  for (std::size_t i = 0; i < table.rows(); ++i) {
    bool ok = true;
    for (std::size_t j : used) ok = ok && std::isfinite(table.columns[j][i]);
    if (!ok) {
      ++dropped;
      continue;
    }
    for (std::size_t j = 0; j < table.columns.size(); ++j) out.columns[j].push_back(table.columns[j][i]);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error(ErrorKind::io, "failed writing " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::io, "cannot move output into place at " + path.string());
  }
}

}  // namespace smoothforge
