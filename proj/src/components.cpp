#include "gfa/components.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

#include "gfa/error.hpp"

namespace gfa {

std::string to_string(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::Shared:
      return "shared";
    case ComponentKind::ViewSpecific:
      return "view-specific";
    case ComponentKind::Inactive:
      return "inactive";
  }
  return "unknown";
}

ViewRoleMap ViewRoleMap::one_per_view(std::size_t num_views) {
  ViewRoleMap map;
  for (std::size_t m = 0; m < num_views; ++m) {
    map.roles.push_back("view" + std::to_string(m + 1));
  }
  return map;
}

ActivityMatrix activity_matrix(const PosteriorSummary& summary, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw InvalidInput("activity threshold must lie in [0, 1]");
  }
  return (summary.activity_mean.array() >= threshold).cast<int>();
}

std::vector<ComponentClass> classify_components(const ActivityMatrix& activity,
                                                const ViewRoleMap& roles) {
  if (static_cast<Index>(roles.roles.size()) != activity.rows()) {
    throw InvalidInput("role map must assign exactly one role per view");
  }
  std::vector<ComponentClass> out;
  out.reserve(static_cast<std::size_t>(activity.cols()));
  for (Index k = 0; k < activity.cols(); ++k) {
    std::set<std::string> active_roles;
    for (Index m = 0; m < activity.rows(); ++m) {
      if (activity(m, k) != 0) active_roles.insert(roles.roles[static_cast<std::size_t>(m)]);
    }
    ComponentClass c;
    if (active_roles.empty()) {
      c.kind = ComponentKind::Inactive;
    } else if (active_roles.size() >= 2) {
      c.kind = ComponentKind::Shared;
    } else {
      c.kind = ComponentKind::ViewSpecific;
    }
    for (const auto& r : active_roles) {
      c.role += (c.role.empty() ? "" : "+") + r;
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<ComponentLabel> order_components(std::span<const double> variance,
                                             std::span<const ComponentClass> classes) {
  if (variance.size() != classes.size()) {
    throw InvalidInput("variance and classification lengths differ");
  }
  auto ranked = [&](ComponentKind kind, const std::string& prefix) {
    std::vector<Index> idx;
    for (std::size_t k = 0; k < classes.size(); ++k) {
      if (classes[k].kind == kind) idx.push_back(static_cast<Index>(k));
    }
    std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) {
      return variance[static_cast<std::size_t>(a)] > variance[static_cast<std::size_t>(b)];
    });
    std::vector<ComponentLabel> labels;
    for (std::size_t r = 0; r < idx.size(); ++r) {
      labels.push_back({idx[r], prefix + std::to_string(r + 1),
                        variance[static_cast<std::size_t>(idx[r])]});
    }
    return labels;
  };
  auto out = ranked(ComponentKind::Shared, "");
  auto specific = ranked(ComponentKind::ViewSpecific, "SP");
  out.insert(out.end(), specific.begin(), specific.end());
  return out;
}

std::vector<double> benjamini_hochberg(std::span<const double> p_values) {
  const std::size_t n = p_values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
  std::vector<double> q(n);
  double running = 1.0;
  for (std::size_t r = n; r-- > 0;) {
    // ratio >= 1 first, so rounding never pushes q below p
    const double adj = p_values[order[r]] * (static_cast<double>(n) / static_cast<double>(r + 1));
    running = std::min(running, adj);
    q[order[r]] = running;
  }
  return q;
}

double null_scale(const Eigen::VectorXd& scores) {
  std::vector<double> mags(static_cast<std::size_t>(scores.size()));
  for (Index i = 0; i < scores.size(); ++i) mags[static_cast<std::size_t>(i)] = std::abs(scores(i));
  const auto mid = mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2);
  std::nth_element(mags.begin(), mid, mags.end());
  double med = *mid;
  if (mags.size() % 2 == 0) {
    med = 0.5 * (med + *std::max_element(mags.begin(), mid));
  }
  // median |z| of a centered normal is 0.6745 sd
  return med / 0.674489750196081743;
}

std::vector<SampleSignificance> permutation_significance(const Eigen::VectorXd& scores,
                                                         int n_permutations) {
  if (n_permutations < 100) {
    throw InvalidInput("permutation test needs at least 100 permutations");
  }
  const Index n = scores.size();
  if (n < 2) {
    throw InvalidInput("permutation test needs at least 2 samples");
  }
  // Null: sign-symmetric normal with the bulk's scale. p is the expected
  // value of (1 + #exceedances) / (P N + 1) over P N null draws, so the
  // smallest attainable p is set by the number of permutations.
  const double scale = null_scale(scores);
  const double draws = static_cast<double>(n_permutations) * static_cast<double>(n);
  std::vector<double> p(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const double a = std::abs(scores(i));
    double tail = 1.0;
    if (scale > 0.0) {
      tail = std::erfc(a / (scale * std::sqrt(2.0)));
    } else if (a > 0.0) {
      tail = 0.0;
    }
    p[static_cast<std::size_t>(i)] = (1.0 + draws * tail) / (draws + 1.0);
  }
  const auto q = benjamini_hochberg(p);

  std::vector<SampleSignificance> out;
  for (Index i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    out.push_back({i, scores(i), p[ui], q[ui]});
  }
  return out;
}

std::vector<SampleSignificance> significant_samples(const Eigen::VectorXd& scores,
                                                    int n_permutations, double q_threshold) {
  if (n_permutations < 100) {
    throw InvalidInput("permutation test needs at least 100 permutations");
  }
  if (scores.size() == 0 || (scores.array() == 0.0).all()) {
    return {};
  }
  auto all = permutation_significance(scores, n_permutations);
  std::vector<SampleSignificance> out;
  for (const auto& s : all) {
    if (s.q_value < q_threshold) out.push_back(s);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::abs(a.score) > std::abs(b.score);
  });
  return out;
}

TopLoadings top_loadings(const Eigen::VectorXd& column, const std::vector<std::string>& names,
                         int n) {
  if (n < 1) {
    throw InvalidInput("number of top loadings must be at least 1");
  }
  if (static_cast<Index>(names.size()) != column.size()) {
    throw InvalidInput("feature names do not match loading length");
  }
  std::vector<Index> idx(static_cast<std::size_t>(column.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) {
    return std::abs(column(a)) > std::abs(column(b));
  });
  TopLoadings out;
  out.degenerate = (column.array() == 0.0).all();
  const auto take = std::min<std::size_t>(idx.size(), static_cast<std::size_t>(n));
  for (std::size_t r = 0; r < take; ++r) {
    out.entries.push_back({idx[r], names[static_cast<std::size_t>(idx[r])], column(idx[r])});
  }
  return out;
}

namespace {

Eigen::VectorXd concatenated_loadings(const ModelState& state, Index k) {
  Index total = 0;
  for (const auto& w : state.loadings) total += w.rows();
  Eigen::VectorXd v(total);
  Index offset = 0;
  for (const auto& w : state.loadings) {
    v.segment(offset, w.rows()) = w.col(k);
    offset += w.rows();
  }
  return v;
}

double abs_pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::ArrayXd xc = x.array() - x.mean();
  const Eigen::ArrayXd yc = y.array() - y.mean();
  const double sxx = xc.square().sum();
  const double syy = yc.square().sum();
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return std::abs((xc * yc).sum() / std::sqrt(sxx * syy));
}

}  // namespace

double chain_similarity(const PosteriorSummary& a, const PosteriorSummary& b,
                        const ViewRoleMap& roles, double match_threshold,
                        double activity_threshold) {
  const auto& sa = a.mean_state;
  const auto& sb = b.mean_state;
  if (sa.loadings.size() != sb.loadings.size()) {
    throw InvalidInput("summaries have different numbers of views");
  }
  for (std::size_t m = 0; m < sa.loadings.size(); ++m) {
    if (sa.loadings[m].rows() != sb.loadings[m].rows()) {
      throw InvalidInput("summaries have different feature counts in view " + std::to_string(m));
    }
  }
  const auto classes = classify_components(activity_matrix(a, activity_threshold), roles);
  std::vector<Index> shared;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    if (classes[k].kind == ComponentKind::Shared) shared.push_back(static_cast<Index>(k));
  }
  if (shared.empty()) {
    throw NoResult("first summary has no shared components");
  }

  const Index kb = sb.num_components();
  std::vector<Eigen::VectorXd> bvecs;
  for (Index j = 0; j < kb; ++j) bvecs.push_back(concatenated_loadings(sb, j));

  std::vector<std::tuple<double, std::size_t, Index>> pairs;
  for (std::size_t i = 0; i < shared.size(); ++i) {
    const auto va = concatenated_loadings(sa, shared[i]);
    for (Index j = 0; j < kb; ++j) {
      pairs.emplace_back(abs_pearson(va, bvecs[static_cast<std::size_t>(j)]), i, j);
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const auto& x, const auto& y) { return std::get<0>(x) > std::get<0>(y); });

  std::vector<bool> a_used(shared.size(), false);
  std::vector<bool> b_used(static_cast<std::size_t>(kb), false);
  std::size_t reproduced = 0;
  for (const auto& [corr, i, j] : pairs) {
    if (a_used[i] || b_used[static_cast<std::size_t>(j)]) continue;
    a_used[i] = true;
    b_used[static_cast<std::size_t>(j)] = true;
    if (corr >= match_threshold) ++reproduced;
  }
  return static_cast<double>(reproduced) / static_cast<double>(shared.size());
}

std::vector<ComponentReport> build_reports(const PosteriorSummary& summary,
                                           const DatasetLabels& labels, const ViewRoleMap& roles,
                                           const ReportOptions& options) {
  const auto& state = summary.mean_state;
  const auto activity = activity_matrix(summary, options.activity_threshold);
  const auto classes = classify_components(activity, roles);
  const Eigen::VectorXd ve = variance_explained(state);
  const std::vector<double> ve_vec(ve.data(), ve.data() + ve.size());
  const auto order = order_components(ve_vec, classes);

  if (labels.feature_names.size() != state.loadings.size() ||
      static_cast<Index>(labels.sample_ids.size()) != state.scores.rows()) {
    throw InvalidInput("labels do not match the summary shape");
  }

  std::vector<ComponentReport> reports;
  int shared_rank = 0;
  int specific_rank = 0;
  for (const auto& lab : order) {
    ComponentReport rep;
    rep.component = lab.component;
    rep.label = lab.label;
    rep.classification = classes[static_cast<std::size_t>(lab.component)];
    rep.variance = lab.variance;
    rep.variance_rank =
        rep.classification.kind == ComponentKind::Shared ? ++shared_rank : ++specific_rank;
    for (Index m = 0; m < activity.rows(); ++m) {
      rep.activity.push_back(activity(m, lab.component));
    }
    rep.significant =
        significant_samples(state.scores.col(lab.component), options.n_permutations,
                            options.q_threshold);
    for (std::size_t m = 0; m < state.loadings.size(); ++m) {
      if (activity(static_cast<Index>(m), lab.component) == 0) {
        rep.top.emplace_back();
        continue;
      }
      rep.top.push_back(top_loadings(state.loadings[m].col(lab.component), labels.feature_names[m],
                                     options.n_top));
    }
    reports.push_back(std::move(rep));
  }
  return reports;
}

}  // namespace gfa
