#include "gfa/ingest.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

#include "gfa/error.hpp"
#include "gfa/tsv.hpp"

namespace gfa {

void ProfileTable::validate() const {
  if (static_cast<Index>(row_ids.size()) != values.rows() ||
      static_cast<Index>(feature_names.size()) != values.cols()) {
    throw InvalidInput("profile table '" + name + "': labels do not match its shape");
  }
  std::set<std::string> seen;
  for (const auto& f : feature_names) {
    if (!seen.insert(f).second) {
      throw InvalidInput("profile table '" + name + "': duplicate feature '" + f + "'");
    }
  }
  if (!values.allFinite()) {
    throw InvalidInput("profile table '" + name + "' contains non-finite values");
  }
}

ProfileTable merge_replicates(const ProfileTable& table) {
  table.validate();
  std::unordered_map<std::string, std::size_t> slot;
  std::vector<std::string> ids;
  std::vector<int> counts;
  for (const auto& id : table.row_ids) {
    auto [it, inserted] = slot.try_emplace(id, ids.size());
    if (inserted) {
      ids.push_back(id);
      counts.push_back(0);
    }
    ++counts[it->second];
  }

  ProfileTable out;
  out.name = table.name;
  out.feature_names = table.feature_names;
  out.values = Eigen::MatrixXd::Zero(static_cast<Index>(ids.size()), table.values.cols());
  for (Index r = 0; r < table.values.rows(); ++r) {
    out.values.row(static_cast<Index>(slot.at(table.row_ids[static_cast<std::size_t>(r)]))) +=
        table.values.row(r);
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (counts[i] > 1) out.values.row(static_cast<Index>(i)) /= static_cast<double>(counts[i]);
  }
  out.row_ids = std::move(ids);
  return out;
}

Eigen::VectorXd threshold_top_genes(const Eigen::VectorXd& row, int n_up, int n_down) {
  if (n_up < 0 || n_down < 0) {
    throw InvalidInput("top-gene counts must be non-negative");
  }
  std::vector<Index> pos;
  std::vector<Index> neg;
  for (Index i = 0; i < row.size(); ++i) {
    if (row(i) > 0.0) pos.push_back(i);
    if (row(i) < 0.0) neg.push_back(i);
  }
  // Stable sort keeps the lower index first among equal values.
  std::stable_sort(pos.begin(), pos.end(), [&](Index a, Index b) { return row(a) > row(b); });
  std::stable_sort(neg.begin(), neg.end(), [&](Index a, Index b) { return row(a) < row(b); });

  Eigen::VectorXd out = Eigen::VectorXd::Zero(row.size());
  const auto keep_up = std::min(pos.size(), static_cast<std::size_t>(n_up));
  const auto keep_down = std::min(neg.size(), static_cast<std::size_t>(n_down));
  for (std::size_t i = 0; i < keep_up; ++i) out(pos[i]) = row(pos[i]);
  for (std::size_t i = 0; i < keep_down; ++i) out(neg[i]) = row(neg[i]);
  return out;
}

ProfileTable threshold_table(const ProfileTable& table, int n_up, int n_down) {
  table.validate();
  ProfileTable out = table;
  for (Index r = 0; r < out.values.rows(); ++r) {
    out.values.row(r) = threshold_top_genes(table.values.row(r).transpose(), n_up, n_down).transpose();
  }
  return out;
}

AssembledDataset assemble_dataset(const std::vector<ProfileTable>& views, bool center, bool scale) {
  if (views.size() < 2) {
    throw InvalidInput("at least 2 views are required");
  }
  std::vector<std::unordered_map<std::string, Index>> row_of(views.size());
  for (std::size_t m = 0; m < views.size(); ++m) {
    views[m].validate();
    for (std::size_t r = 0; r < views[m].row_ids.size(); ++r) {
      if (!row_of[m].try_emplace(views[m].row_ids[r], static_cast<Index>(r)).second) {
        throw InvalidInput("view '" + views[m].name + "' has duplicate row id '" +
                           views[m].row_ids[r] + "'; merge replicates first");
      }
    }
  }

  std::vector<std::string> common;
  for (const auto& id : views.front().row_ids) {
    bool everywhere = true;
    for (std::size_t m = 1; m < views.size() && everywhere; ++m) {
      everywhere = row_of[m].contains(id);
    }
    if (everywhere) common.push_back(id);
  }
  if (common.empty()) {
    throw InvalidInput("views share no row ids");
  }
  std::sort(common.begin(), common.end());

  AssembledDataset out;
  out.report.paired_rows = common.size();
  out.dataset.sample_ids = common;
  for (std::size_t m = 0; m < views.size(); ++m) {
    const auto& src = views[m];
    ViewMatrix view;
    view.name = src.name;
    view.feature_names = src.feature_names;
    view.sample_ids = common;
    view.values.resize(static_cast<Index>(common.size()), src.values.cols());
    for (std::size_t i = 0; i < common.size(); ++i) {
      view.values.row(static_cast<Index>(i)) = src.values.row(row_of[m].at(common[i]));
    }
    out.report.dropped_rows.push_back(src.row_ids.size() - common.size());
    out.dataset.views.push_back(std::move(view));
  }
  out.dataset = standardize_columns(std::move(out.dataset), center, scale);
  return out;
}

ProfileTable load_view(const std::filesystem::path& path) {
  auto raw = read_labeled_matrix(path);
  ProfileTable table;
  table.name = path.stem().string();
  table.values = std::move(raw.values);
  table.row_ids = std::move(raw.row_ids);
  table.feature_names = std::move(raw.column_names);
  std::set<std::string> seen;
  for (const auto& f : table.feature_names) {
    if (!seen.insert(f).second) {
      throw ParseError(path.string(), 1, "duplicate feature name '" + f + "'");
    }
  }
  return table;
}

void save_view(const ProfileTable& table, const std::filesystem::path& path) {
  table.validate();
  LabeledMatrix out;
  out.corner = "sample_id";
  out.row_ids = table.row_ids;
  out.column_names = table.feature_names;
  out.values = table.values;
  write_labeled_matrix(path, out);
}

}  // namespace gfa
