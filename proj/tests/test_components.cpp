#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"
#include "gfa/components.hpp"
#include "gfa/error.hpp"
#include "support.hpp"

using namespace gfa;

namespace {

PosteriorSummary summary_with_activity(const Eigen::MatrixXd& activity_mean) {
  PosteriorSummary s;
  s.activity_mean = activity_mean;
  return s;
}

ViewRoleMap chem_bio() { return ViewRoleMap{{"chemistry", "chemistry", "biology", "biology", "biology"}}; }

ActivityMatrix column(std::initializer_list<int> v) {
  ActivityMatrix a(static_cast<Index>(v.size()), 1);
  Index i = 0;
  for (int x : v) a(i++, 0) = x;
  return a;
}

// Brute-force BH: q_(i) = min over j >= i of p_(j) * n / j.
std::vector<double> bh_oracle(const std::vector<double>& p) {
  const std::size_t n = p.size();
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rank = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (p[j] < p[i] || (p[j] == p[i] && j <= i)) ++rank;
    }
    double best = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t rj = 0;
      for (std::size_t l = 0; l < n; ++l) {
        if (p[l] < p[j] || (p[l] == p[j] && l <= j)) ++rj;
      }
      if (rj >= rank) best = std::min(best, p[j] * static_cast<double>(n) / static_cast<double>(rj));
    }
    q[i] = best;
  }
  return q;
}

// Pooled null sampled explicitly: P*N sign-flipped draws at the null scale.
// Returns the raw Monte-Carlo p-values and their binomial standard errors.
std::pair<std::vector<double>, std::vector<double>> sampled_null_p(const Eigen::VectorXd& z,
                                                                    int n_perm,
                                                                    std::uint64_t seed) {
  const double scale = null_scale(z);
  RandomStream rng(seed);
  const auto draws = static_cast<std::size_t>(n_perm) * static_cast<std::size_t>(z.size());
  std::vector<double> null;
  for (std::size_t i = 0; i < draws; ++i) {
    null.push_back((rng.uniform() < 0.5 ? -1.0 : 1.0) * std::abs(rng.normal()) * scale);
  }
  std::vector<double> p, se;
  for (Index i = 0; i < z.size(); ++i) {
    double count = 0.0;
    for (double v : null) count += std::abs(v) >= std::abs(z(i)) ? 1.0 : 0.0;
    const double d = static_cast<double>(draws);
    p.push_back((1.0 + count) / (d + 1.0));
    const double t = count / d;
    se.push_back(std::sqrt(std::max(t * (1 - t), 1.0 / d) / d));
  }
  return {p, se};
}

}  // namespace

TEST_CASE("activity_matrix") {
  Eigen::MatrixXd am(2, 3);
  am << 1.0, 0.5, 0.49, 0.0, 0.51, 1.0;
  const auto s = summary_with_activity(am);
  const auto a = activity_matrix(s);
  CHECK(a(0, 0) == 1);
  CHECK(a(0, 1) == 1);  // tie goes to active
  CHECK(a(0, 2) == 0);
  CHECK(a(1, 0) == 0);
  CHECK(activity_matrix(summary_with_activity(Eigen::MatrixXd::Ones(3, 4))).isOnes());
  CHECK_THROWS_AS(activity_matrix(s, 1.5), InvalidInput);
  CHECK_THROWS_AS(activity_matrix(s, -0.1), InvalidInput);
  // monotone in the threshold
  RandomStream rng(1);
  Eigen::MatrixXd r(4, 6);
  for (Index i = 0; i < r.size(); ++i) r.data()[i] = rng.uniform();
  const auto rs = summary_with_activity(r);
  for (int i = 0; i < 20; ++i) {
    const double lo = i / 20.0, hi = (i + 1) / 20.0;
    CHECK(((activity_matrix(rs, hi).array() - activity_matrix(rs, lo).array()) <= 0).all());
  }
}

TEST_CASE("classify_components") {
  const auto roles = chem_bio();
  CHECK(classify_components(column({1, 0, 1, 0, 0}), roles)[0].kind == ComponentKind::Shared);
  const auto bio = classify_components(column({0, 0, 1, 1, 1}), roles)[0];
  CHECK(bio.kind == ComponentKind::ViewSpecific);
  CHECK(bio.role == "biology");
  const auto chem = classify_components(column({1, 1, 0, 0, 0}), roles)[0];
  CHECK(chem.kind == ComponentKind::ViewSpecific);
  CHECK(chem.role == "chemistry");
  CHECK(classify_components(column({0, 0, 0, 0, 0}), roles)[0].kind == ComponentKind::Inactive);
  CHECK(classify_components(column({0, 1, 0, 0, 1}), roles)[0].role == "biology+chemistry");
  // one role per view: any two active views are shared
  const auto own = ViewRoleMap::one_per_view(3);
  CHECK(classify_components(column({1, 0, 1}), own)[0].kind == ComponentKind::Shared);
  CHECK(classify_components(column({0, 1, 0}), own)[0].kind == ComponentKind::ViewSpecific);
  CHECK_THROWS_AS(classify_components(column({1, 1}), roles), InvalidInput);
  CHECK(to_string(ComponentKind::ViewSpecific) == "view-specific");
}

TEST_CASE("order_components") {
  using K = ComponentKind;
  auto cls = [](std::initializer_list<K> kinds) {
    std::vector<ComponentClass> out;
    for (auto k : kinds) out.push_back({k, ""});
    return out;
  };
  SUBCASE("larger shared variance comes first") {
    const std::vector<double> ve{5, 9};
    const auto classes = cls({K::Shared, K::Shared});
    const auto lab = order_components(ve, classes);
    REQUIRE(lab.size() == 2);
    CHECK(lab[0].component == 1);
    CHECK(lab[0].label == "1");
    CHECK(lab[1].label == "2");
  }
  SUBCASE("shared and specific numbered separately") {
    const std::vector<double> ve{1, 7};
    const auto classes = cls({K::Shared, K::ViewSpecific});
    const auto lab = order_components(ve, classes);
    CHECK(lab[0].label == "1");
    CHECK(lab[0].component == 0);
    CHECK(lab[1].label == "SP1");
  }
  SUBCASE("ties keep component order; inactive dropped; output is a permutation") {
    const std::vector<double> ve{3, 3, 0, 3, 8, 1};
    const auto classes =
        cls({K::ViewSpecific, K::Shared, K::Inactive, K::Shared, K::ViewSpecific, K::Shared});
    const auto lab = order_components(ve, classes);
    std::vector<std::string> names;
    std::vector<Index> comps;
    for (const auto& l : lab) {
      names.push_back(l.label);
      comps.push_back(l.component);
    }
    CHECK(names == std::vector<std::string>{"1", "2", "3", "SP1", "SP2"});
    CHECK(comps == std::vector<Index>{1, 3, 5, 4, 0});
  }
}

TEST_CASE("benjamini_hochberg") {
  RandomStream rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> p;
    for (int i = 0; i < 25; ++i) p.push_back(trial % 2 ? rng.uniform() * 0.1 : rng.uniform());
    p[3] = p[7];  // a tie
    const auto q = benjamini_hochberg(p);
    const auto oracle = bh_oracle(p);
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK(q[i] == doctest::Approx(oracle[i]).epsilon(1e-14));
      CHECK(q[i] >= p[i]);
      CHECK(q[i] <= 1.0);
    }
    std::vector<std::size_t> order(p.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return p[a] < p[b]; });
    for (std::size_t r = 1; r < order.size(); ++r) CHECK(q[order[r]] >= q[order[r - 1]]);
  }
}

TEST_CASE("significant_samples") {
  SUBCASE("equal scores give uniform p and nothing significant") {
    const auto all = permutation_significance(Eigen::VectorXd::Constant(30, 1.7), 1000);
    for (const auto& s : all) CHECK(s.p_value == all[0].p_value);
    CHECK(all[0].p_value == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(significant_samples(Eigen::VectorXd::Constant(30, 1.7), 1000).empty());
  }
  SUBCASE("constant zero column gives an empty result") {
    CHECK(significant_samples(Eigen::VectorXd::Zero(10)).empty());
  }
  SUBCASE("closed form matches an explicitly sampled pooled null") {
    RandomStream rng(3);
    Eigen::VectorXd z(50);
    for (Index i = 0; i < 50; ++i) z(i) = rng.normal();
    z(17) = 100.0;
    const auto [mc, se] = sampled_null_p(z, 400, 4);
    const auto got = permutation_significance(z, 400);
    for (Index i = 0; i < 50; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      CHECK(std::abs(got[ui].p_value - mc[ui]) < 4.0 * se[ui] + 1e-12);
    }
    CHECK(got[17].p_value == doctest::Approx(1.0 / (400.0 * 50.0 + 1.0)));
    const auto sig = significant_samples(z, 10000, 0.05);
    REQUIRE_FALSE(sig.empty());
    CHECK(sig.front().sample == 17);
    const auto full = permutation_significance(z, 10000);
    for (const auto& s : full) CHECK(s.q_value >= full[17].q_value);
  }
  SUBCASE("null scale is the normal-consistent median magnitude") {
    Eigen::VectorXd z(4);
    z << -1.0, 3.0, 0.5, -2.0;
    CHECK(null_scale(z) == doctest::Approx(1.5 / 0.6744897501960817));
  }
  SUBCASE("a heavy tail is picked up, a normal bulk is not") {
    RandomStream rng(5);
    Eigen::VectorXd z(200);
    for (Index i = 0; i < 200; ++i) z(i) = rng.normal();
    for (Index i = 0; i < 5; ++i) z(i) = 20.0 + i;
    const auto sig = significant_samples(z);
    std::set<Index> hits;
    for (const auto& s : sig) hits.insert(s.sample);
    for (Index i = 0; i < 5; ++i) CHECK(hits.count(i) == 1);
    for (std::size_t r = 1; r < sig.size(); ++r) {
      CHECK(std::abs(sig[r].score) <= std::abs(sig[r - 1].score));
    }
  }
  SUBCASE("invariant under sign flip and positive scaling") {
    RandomStream rng(6);
    Eigen::VectorXd z(40);
    for (Index i = 0; i < 40; ++i) z(i) = rng.normal() * (i < 3 ? 8.0 : 1.0);
    const auto a = permutation_significance(z, 500);
    const auto b = permutation_significance(-z, 500);
    const auto c = permutation_significance(4.0 * z, 500);    // exact in floating point
    const auto d = permutation_significance(3.5 * z, 500);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].p_value == b[i].p_value);
      CHECK(a[i].q_value == b[i].q_value);
      CHECK(a[i].p_value == c[i].p_value);
      CHECK(a[i].q_value == c[i].q_value);
      CHECK(a[i].p_value == doctest::Approx(d[i].p_value).epsilon(1e-12));
      CHECK(a[i].q_value == doctest::Approx(d[i].q_value).epsilon(1e-12));
    }
  }
  SUBCASE("too few permutations") {
    CHECK_THROWS_AS(significant_samples(Eigen::VectorXd::Ones(5), 99), InvalidInput);
  }
}

TEST_CASE("top_loadings") {
  const std::vector<std::string> names{"a", "b", "c"};
  Eigen::VectorXd w(3);
  w << -5, 2, 0;
  const auto top = top_loadings(w, names, 2);
  REQUIRE(top.entries.size() == 2);
  CHECK(top.entries[0].name == "a");
  CHECK(top.entries[0].weight == -5.0);
  CHECK(top.entries[1].name == "b");
  CHECK_FALSE(top.degenerate);
  CHECK(top_loadings(w, names, 10).entries.size() == 3);

  std::vector<std::string> many;
  for (int i = 0; i < 50; ++i) many.push_back("f" + std::to_string(i));
  const auto zero = top_loadings(Eigen::VectorXd::Zero(50), many);
  CHECK(zero.entries.size() == 30);
  CHECK(zero.degenerate);
  CHECK(zero.entries[0].name == "f0");
  CHECK_THROWS_AS(top_loadings(w, names, 0), InvalidInput);
  CHECK_THROWS_AS(top_loadings(w, many, 2), InvalidInput);
}

namespace {

PosteriorSummary structured_summary(RandomStream& rng, Index k, const std::vector<Index>& dims) {
  PosteriorSummary s;
  s.mean_state.scores = Eigen::MatrixXd::Zero(5, k);
  s.activity_mean = Eigen::MatrixXd::Ones(static_cast<Index>(dims.size()), k);
  for (auto d : dims) {
    Eigen::MatrixXd w(d, k);
    for (Index i = 0; i < w.size(); ++i) w.data()[i] = rng.normal();
    s.mean_state.loadings.push_back(w);
  }
  return s;
}

}  // namespace

TEST_CASE("chain_similarity") {
  RandomStream rng(7);
  const std::vector<Index> dims{100, 150, 250};
  const auto roles = ViewRoleMap::one_per_view(3);
  const auto a = structured_summary(rng, 6, dims);
  CHECK(chain_similarity(a, a, roles) == 1.0);

  SUBCASE("permuted and sign-flipped copy") {
    auto b = a;
    const std::vector<Index> perm{3, 0, 5, 1, 4, 2};
    for (std::size_t m = 0; m < dims.size(); ++m) {
      for (Index j = 0; j < 6; ++j) {
        b.mean_state.loadings[m].col(j) = (j % 2 ? -1.0 : 1.0) * a.mean_state.loadings[m].col(perm[static_cast<std::size_t>(j)]);
      }
    }
    CHECK(chain_similarity(a, b, roles) == 1.0);
    CHECK(chain_similarity(b, a, roles) == 1.0);
  }
  SUBCASE("independent loadings reproduce nothing") {
    const auto b = structured_summary(rng, 6, dims);
    CHECK(chain_similarity(a, b, roles) == 0.0);
  }
  SUBCASE("partial reproduction counts components") {
    auto b = structured_summary(rng, 6, dims);
    for (std::size_t m = 0; m < dims.size(); ++m) {
      b.mean_state.loadings[m].col(2) = a.mean_state.loadings[m].col(0);
    }
    CHECK(chain_similarity(a, b, roles) == doctest::Approx(1.0 / 6.0));
  }
  SUBCASE("only shared components of the first summary count") {
    auto a2 = a;
    a2.activity_mean.setZero();
    a2.activity_mean(0, 0) = 1.0;
    CHECK_THROWS_AS(chain_similarity(a2, a, roles), NoResult);
  }
  SUBCASE("shape mismatch") {
    const auto b = structured_summary(rng, 6, {100, 150, 20});
    CHECK_THROWS_AS(chain_similarity(a, b, roles), InvalidInput);
  }
}

TEST_CASE("build_reports") {
  const auto ds = test::zeros_dataset(60, {4, 3});
  PosteriorSummary s;
  s.mean_state = test::blank_state(ds, 3);
  s.activity_mean = Eigen::MatrixXd(2, 3);
  s.activity_mean << 1.0, 0.9, 0.1, 0.8, 0.2, 0.0;
  s.mean_state.active = (s.activity_mean.array() >= 0.5).cast<int>();
  RandomStream rng(8);
  for (Index i = 0; i < 60; ++i) {
    s.mean_state.scores(i, 0) = rng.normal();
    s.mean_state.scores(i, 1) = rng.normal();
  }
  s.mean_state.scores(4, 0) = 40.0;
  s.mean_state.loadings[0].col(0) << 1, -3, 2, 0.5;
  s.mean_state.loadings[1].col(0) << 0.1, 0.2, -0.3;
  s.mean_state.loadings[0].col(1) << 0.1, 0.1, 0.1, 0.1;
  const auto labels = labels_of(ds);
  const auto reports = build_reports(s, labels, ViewRoleMap::one_per_view(2));
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].label == "1");
  CHECK(reports[0].component == 0);
  CHECK(reports[0].classification.kind == ComponentKind::Shared);
  CHECK(reports[0].activity == std::vector<int>{1, 1});
  CHECK(reports[0].top[0].entries[0].name == labels.feature_names[0][1]);
  REQUIRE_FALSE(reports[0].significant.empty());
  CHECK(reports[0].significant[0].sample == 4);
  CHECK(reports[1].label == "SP1");
  CHECK(reports[1].top[1].entries.empty());
  for (const auto& r : reports) {
    for (const auto& sig : r.significant) {
      CHECK(sig.q_value >= 0.0);
      CHECK(sig.q_value < 0.05);
    }
  }
}
