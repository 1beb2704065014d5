#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gfa/model.hpp"

namespace gfa {

// Raw per-view profile table; row ids may repeat (technical replicates).
struct ProfileTable {
  std::string name;
  Eigen::MatrixXd values;
  std::vector<std::string> row_ids;
  std::vector<std::string> feature_names;

  void validate() const;
  bool operator==(const ProfileTable&) const = default;
};

// One row per unique id (first-appearance order), the mean of its replicates.
ProfileTable merge_replicates(const ProfileTable& table);

inline constexpr int kDefaultTopUp = 2000;
inline constexpr int kDefaultTopDown = 2000;

// Keeps the n_up largest positive and n_down most negative entries, zeroes
// everything else. Ties at the cutoff go to the lower feature index.
Eigen::VectorXd threshold_top_genes(const Eigen::VectorXd& row, int n_up = kDefaultTopUp,
                                    int n_down = kDefaultTopDown);

// Row-wise threshold_top_genes over a whole table.
ProfileTable threshold_table(const ProfileTable& table, int n_up = kDefaultTopUp,
                             int n_down = kDefaultTopDown);

struct AssemblyReport {
  std::vector<std::size_t> dropped_rows;  // per view, rows outside the intersection
  std::size_t paired_rows = 0;
};

struct AssembledDataset {
  MultiViewDataset dataset;
  AssemblyReport report;
};

// Restricts every view to the sorted intersection of row ids, then
// optionally centers/scales columns. Row ids must be unique per view
// (merge replicates first).
AssembledDataset assemble_dataset(const std::vector<ProfileTable>& views, bool center, bool scale);

ProfileTable load_view(const std::filesystem::path& path);
void save_view(const ProfileTable& table, const std::filesystem::path& path);

}  // namespace gfa
