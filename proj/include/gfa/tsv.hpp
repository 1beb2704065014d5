#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace gfa {

// Tab-separated numeric table: header row of column names (first cell is a
// corner label), then one row per record starting with its id.
struct LabeledMatrix {
  std::string corner = "id";
  std::vector<std::string> row_ids;
  std::vector<std::string> column_names;
  Eigen::MatrixXd values;
};

// Strict parse: ragged rows, empty files, non-numeric cells, "NA", and
// non-finite values are ParseErrors carrying the 1-based line number.
LabeledMatrix read_labeled_matrix(const std::filesystem::path& path);
LabeledMatrix parse_labeled_matrix(std::istream& in, const std::string& source);
void write_labeled_matrix(const std::filesystem::path& path, const LabeledMatrix& table);

// Shortest decimal form that round-trips exactly.
std::string format_double(double value);
double parse_double(std::string_view text, const std::string& source, std::size_t line);

std::vector<std::string> split_tabs(std::string_view line);

// Plain string rows (reports, edge lists, id lists). Blank lines are skipped.
std::vector<std::vector<std::string>> read_string_rows(const std::filesystem::path& path);

}  // namespace gfa
