#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gfa/gibbs.hpp"
#include "gfa/model.hpp"

namespace gfa {

enum class ComponentKind { Shared, ViewSpecific, Inactive };

std::string to_string(ComponentKind kind);

// Declared role of each view, e.g. "chemistry" or "biology".
struct ViewRoleMap {
  std::vector<std::string> roles;

  // Every view in its own role: shared then simply means "active in >= 2 views".
  static ViewRoleMap one_per_view(std::size_t num_views);
};

struct ComponentClass {
  ComponentKind kind = ComponentKind::Inactive;
  // Role of a view-specific component; roles joined by '+' for shared ones.
  std::string role;
};

ActivityMatrix activity_matrix(const PosteriorSummary& summary, double threshold = 0.5);

std::vector<ComponentClass> classify_components(const ActivityMatrix& activity,
                                                const ViewRoleMap& roles);

struct ComponentLabel {
  Index component = 0;
  std::string label;  // "1", "2", ... for shared; "SP1", ... for view-specific
  double variance = 0.0;
};

// Shared components first, then view-specific, each by descending variance
// (ties by component index). Inactive components are omitted.
std::vector<ComponentLabel> order_components(std::span<const double> variance,
                                             std::span<const ComponentClass> classes);

struct SampleSignificance {
  Index sample = 0;
  double score = 0.0;
  double p_value = 1.0;
  double q_value = 1.0;
};

// Benjamini-Hochberg adjusted q-values, in input order.
std::vector<double> benjamini_hochberg(std::span<const double> p_values);

// Scale of the null score distribution: median |score| / 0.6745, the
// standard deviation of a centered normal with that median magnitude.
double null_scale(const Eigen::VectorXd& scores);

// Two-sided p-values of every score against a pooled sign-symmetric normal
// null with null_scale, then BH. p = (1 + P N tail) / (P N + 1), the
// expected pooled-null p-value for P = n_permutations.
std::vector<SampleSignificance> permutation_significance(const Eigen::VectorXd& scores,
                                                         int n_permutations);

// Samples with q < q_threshold, sorted by |score| descending.
std::vector<SampleSignificance> significant_samples(const Eigen::VectorXd& scores,
                                                    int n_permutations = 10000,
                                                    double q_threshold = 0.05);

struct LoadingEntry {
  Index feature = 0;
  std::string name;
  double weight = 0.0;
};

struct TopLoadings {
  std::vector<LoadingEntry> entries;
  bool degenerate = false;  // column is all zeros
};

TopLoadings top_loadings(const Eigen::VectorXd& column, const std::vector<std::string>& names,
                         int n = 30);

// Fraction of A's shared components that have a greedy match in B with
// |Pearson correlation| of concatenated loadings >= match_threshold.
double chain_similarity(const PosteriorSummary& a, const PosteriorSummary& b,
                        const ViewRoleMap& roles, double match_threshold = 0.8,
                        double activity_threshold = 0.5);

struct ReportOptions {
  double activity_threshold = 0.5;
  int n_top = 30;
  int n_permutations = 10000;
  double q_threshold = 0.05;
};

struct ComponentReport {
  Index component = 0;
  std::string label;
  ComponentClass classification;
  std::vector<int> activity;  // per view
  double variance = 0.0;
  int variance_rank = 0;      // 1-based within its kind
  std::vector<SampleSignificance> significant;
  std::vector<TopLoadings> top;  // per view; empty entries for inactive views
};

// Reports for every non-inactive component in label order.
std::vector<ComponentReport> build_reports(const PosteriorSummary& summary,
                                           const DatasetLabels& labels, const ViewRoleMap& roles,
                                           const ReportOptions& options = {});

}  // namespace gfa
