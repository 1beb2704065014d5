#include <algorithm>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "gfa/error.hpp"
#include "gfa/validation.hpp"
#include "validation_support.hpp"

using namespace gfa;
using Edges = std::vector<std::pair<std::string, std::string>>;

TEST_CASE("build_graph") {
  SUBCASE("path through one term") {
    const OntologyGraph g({{"c1", "t"}, {"t", "c2"}}, {"c1", "c2"});
    CHECK(g.compound_distance("c1", "c2") == 2);
    CHECK(g.num_nodes() == 3);
  }
  SUBCASE("duplicate edges collapse") {
    const OntologyGraph g({{"a", "b"}, {"a", "b"}, {"b", "a"}}, {"a", "b"});
    CHECK(g.num_edges() == 1);
    CHECK(g.adjacency()[0].size() == 1);
  }
  SUBCASE("rejections") {
    CHECK_THROWS_AS(build_graph({{"a", "a"}}, {"a"}), InvalidInput);
    CHECK_THROWS_AS(build_graph({{"a", "b"}}, {"a", "zz"}), InvalidInput);
    CHECK_THROWS_AS(build_graph({{"a", ""}}, {"a"}), InvalidInput);
  }
}

TEST_CASE("pair_similarity") {
  // c1 - t1 - c2 - t2 - c3 ; c4 isolated on its own edge
  const OntologyGraph g({{"c1", "t1"}, {"t1", "c2"}, {"c2", "t2"}, {"t2", "c3"}, {"c4", "t9"}},
                        {"c1", "c2", "c3", "c4"});
  CHECK(pair_similarity(g, "c1", "c2", 2) == 0.5);
  CHECK(pair_similarity(g, "c1", "c3", 2) == 0.0);
  CHECK(pair_similarity(g, "c1", "c3", 4) == 0.25);
  CHECK(pair_similarity(g, "c1", "c4", 16) == 0.0);
  CHECK(pair_similarity(g, "c3", "c1", 4) == pair_similarity(g, "c1", "c3", 4));
  CHECK_THROWS_AS(pair_similarity(g, "c1", "t1", 4), InvalidInput);
}

TEST_CASE("set_similarity") {
  SUBCASE("three compounds pairwise at distance 2") {
    const OntologyGraph g({{"a", "t"}, {"b", "t"}, {"c", "t"}}, {"a", "b", "c"});
    CHECK(set_similarity(g, {"a", "b", "c"}, 16)->value == 0.5);
  }
  SUBCASE("distances 2, 4, 4 give exactly one third") {
    const OntologyGraph g({{"a", "t1"}, {"b", "t1"}, {"t1", "t2"}, {"t2", "t3"}, {"t3", "c"}},
                          {"a", "b", "c"});
    REQUIRE(g.compound_distance("a", "b") == 2);
    REQUIRE(g.compound_distance("a", "c") == 4);
    REQUIRE(g.compound_distance("b", "c") == 4);
    const auto s = set_similarity(g, {"a", "b", "c"}, 16);
    CHECK(s->value == 1.0 / 3.0);
  }
  SUBCASE("members outside the graph are dropped and counted") {
    const OntologyGraph g({{"a", "t"}, {"b", "t"}}, {"a", "b"});
    const auto s = set_similarity(g, {"a", "x", "b", "a", "y"}, 16);
    REQUIRE(s.has_value());
    CHECK(s->dropped == 2);
    CHECK(s->retained == 2);
    CHECK(s->value == 0.5);
    CHECK_FALSE(set_similarity(g, {"x", "y"}, 16).has_value());
    CHECK_FALSE(set_similarity(g, {"a", "x"}, 16).has_value());
  }
}

TEST_CASE("component_curve") {
  const OntologyGraph g({{"a", "t1"}, {"b", "t1"}, {"t1", "t2"}, {"t2", "t3"}, {"t3", "c"},
                         {"c", "t4"}, {"t4", "d"}},
                        {"a", "b", "c", "d"});
  CHECK(default_path_lengths().front() == 2);
  CHECK(default_path_lengths().back() == 16);
  CHECK(default_path_lengths().size() == 15);

  const auto lengths = default_path_lengths();
  SUBCASE("single set equals its own similarities") {
    const auto curve = component_curve(g, {{"a", "b", "c"}}, lengths);
    for (std::size_t i = 0; i < lengths.size(); ++i) {
      CHECK(curve.values[i] == set_similarity(g, {"a", "b", "c"}, lengths[i])->value);
    }
    CHECK(curve.evaluable_sets == 1);
  }
  SUBCASE("mean over evaluable sets, monotone in length") {
    const auto curve = component_curve(g, {{"a", "b"}, {"c", "d", "zz"}, {"a"}}, lengths);
    CHECK(curve.evaluable_sets == 2);
    CHECK(curve.dropped_members == 1);
    CHECK(curve.values[0] == doctest::Approx((0.5 + 0.5) / 2));
    for (std::size_t i = 1; i < curve.values.size(); ++i) {
      CHECK(curve.values[i] >= curve.values[i - 1]);
    }
  }
  SUBCASE("nothing evaluable") {
    CHECK_THROWS_AS(component_curve(g, {{"a"}, {"zz", "yy"}}, lengths), NoResult);
  }
  SUBCASE("lengths must increase") {
    CHECK_THROWS_AS(component_curve(g, {{"a", "b"}}, {3, 2}), InvalidInput);
    CHECK_THROWS_AS(component_curve(g, {{"a", "b"}}, {}), InvalidInput);
  }
}

TEST_CASE("random_baseline") {
  SUBCASE("complete compound graph: mean 1, std 0") {
    Edges e;
    std::vector<std::string> ids;
    for (int i = 0; i < 8; ++i) ids.push_back("c" + std::to_string(i));
    for (int i = 0; i < 8; ++i)
      for (int j = i + 1; j < 8; ++j) e.emplace_back(ids[i], ids[j]);
    const OntologyGraph g(e, ids);
    RandomStream rng(1);
    const auto b = random_baseline(g, {3, 5}, {1, 2, 16}, 50, rng);
    for (std::size_t l = 0; l < 3; ++l) {
      CHECK(b.mean[l] == 1.0);
      CHECK(b.std[l] == 0.0);
    }
  }
  SUBCASE("reproducible and monotone") {
    RandomStream gen(2);
    const auto g = test::random_graph(gen, 60, 30, 0.05);
    RandomStream r1(7), r2(7);
    const auto a = random_baseline(g, {4, 6}, default_path_lengths(), 200, r1);
    const auto b = random_baseline(g, {4, 6}, default_path_lengths(), 200, r2);
    CHECK(a.mean == b.mean);
    CHECK(a.std == b.std);
    for (std::size_t i = 1; i < a.mean.size(); ++i) CHECK(a.mean[i] >= a.mean[i - 1]);
  }
  SUBCASE("invalid requests") {
    const OntologyGraph g({{"a", "b"}}, {"a", "b"});
    RandomStream rng(3);
    CHECK_THROWS_AS(random_baseline(g, {3}, {2}, 10, rng), InvalidInput);
    CHECK_THROWS_AS(random_baseline(g, {2}, {2}, 1, rng), InvalidInput);
    CHECK_THROWS_AS(random_baseline(g, {}, {2}, 10, rng), InvalidInput);
  }
}

TEST_CASE("BFS distances equal the Floyd-Warshall oracle") {
  RandomStream gen(4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = test::random_graph(gen, 20 + trial * 15, 10 + trial * 5, 0.03 + 0.01 * trial);
    CHECK(test::matches_floyd_warshall(g));
  }
}

TEST_CASE("planted clique beats the random baseline at short lengths") {
  const auto pc = test::planted_clique(5);
  const auto curve = component_curve(pc.graph, pc.sets, default_path_lengths());
  std::vector<std::size_t> sizes;
  for (const auto& s : pc.sets) sizes.push_back(s.size());
  RandomStream rng(9);
  const auto base = random_baseline(pc.graph, sizes, default_path_lengths(), 1000, rng);
  CHECK(curve.values[0] > base.mean[0] + 2.0 * base.std[0]);
}
