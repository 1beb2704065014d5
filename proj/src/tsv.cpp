#include "gfa/tsv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gfa/error.hpp"

namespace gfa {

namespace {

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.emplace_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, const std::string& source, std::size_t line) {
  if (text.empty()) {
    throw ParseError(source, line, "empty numeric cell");
  }
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (*first == '+') ++first;
  double value = 0.0;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ParseError(source, line, "not a number: '" + std::string(text) + "'");
  }
  if (!std::isfinite(value)) {
    throw ParseError(source, line, "non-finite value: '" + std::string(text) + "'");
  }
  return value;
}

LabeledMatrix parse_labeled_matrix(std::istream& in, const std::string& source) {
  LabeledMatrix table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<std::vector<double>> rows;

  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (!have_header) {
      if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
      if (line.empty()) {
        throw ParseError(source, line_no, "missing header row");
      }
      auto cells = split_tabs(line);
      if (cells.size() < 2) {
        throw ParseError(source, line_no, "header needs an id column and at least one feature");
      }
      table.corner = cells.front();
      table.column_names.assign(cells.begin() + 1, cells.end());
      have_header = true;
      continue;
    }
    if (line.empty()) continue;
    auto cells = split_tabs(line);
    if (cells.size() != table.column_names.size() + 1) {
      throw ParseError(source, line_no,
                       "expected " + std::to_string(table.column_names.size() + 1) +
                           " fields, found " + std::to_string(cells.size()));
    }
    if (cells.front().empty()) {
      throw ParseError(source, line_no, "empty row id");
    }
    std::vector<double> values;
    values.reserve(cells.size() - 1);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      values.push_back(parse_double(cells[c], source, line_no));
    }
    table.row_ids.push_back(std::move(cells.front()));
    rows.push_back(std::move(values));
  }
  if (!have_header) {
    throw ParseError(source, line_no == 0 ? 1 : line_no, "empty file");
  }
  if (rows.empty()) {
    throw ParseError(source, line_no + 1, "no data rows");
  }
  table.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(table.column_names.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return table;
}

LabeledMatrix read_labeled_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InvalidInput("cannot open '" + path.string() + "'");
  }
  return parse_labeled_matrix(in, path.string());
}

void write_labeled_matrix(const std::filesystem::path& path, const LabeledMatrix& table) {
  if (static_cast<Eigen::Index>(table.row_ids.size()) != table.values.rows() ||
      static_cast<Eigen::Index>(table.column_names.size()) != table.values.cols()) {
    throw InvalidInput("table labels do not match its shape");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InvalidInput("cannot write '" + path.string() + "'");
  }
  out << table.corner;
  for (const auto& c : table.column_names) out << '\t' << c;
  out << '\n';
  for (Eigen::Index r = 0; r < table.values.rows(); ++r) {
    out << table.row_ids[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < table.values.cols(); ++c) {
      out << '\t' << format_double(table.values(r, c));
    }
    out << '\n';
  }
  if (!out) {
    throw InvalidInput("failed writing '" + path.string() + "'");
  }
}

std::vector<std::vector<std::string>> read_string_rows(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InvalidInput("cannot open '" + path.string() + "'");
  }
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (line.empty()) continue;
    rows.push_back(split_tabs(line));
  }
  return rows;
}

}  // namespace gfa
