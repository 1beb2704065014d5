#pragma once

// Graph generators and a Floyd-Warshall oracle for the validation tests.

#include <limits>
#include <string>
#include <vector>

#include "gfa/random.hpp"
#include "gfa/validation.hpp"

namespace gfa::test {

// Random graph over `terms` ontology terms and `compounds` compounds. Each
// possible edge is present with probability p; every compound gets at least
// one edge so it is a node of the graph.
inline OntologyGraph random_graph(RandomStream& rng, int terms, int compounds, double p) {
  std::vector<std::string> names;
  for (int i = 0; i < compounds; ++i) names.push_back("c" + std::to_string(i));
  for (int i = 0; i < terms; ++i) names.push_back("t" + std::to_string(i));
  const int n = static_cast<int>(names.size());
  std::vector<std::pair<std::string, std::string>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.uniform() < p) edges.emplace_back(names[i], names[j]);
    }
  }
  for (int i = 0; i < compounds; ++i) {
    const int t = compounds + static_cast<int>(rng.uniform() * terms);
    edges.emplace_back(names[i], names[std::min(t, n - 1)]);
  }
  std::vector<std::string> ids(names.begin(), names.begin() + compounds);
  return OntologyGraph(edges, ids);
}

inline bool matches_floyd_warshall(const OntologyGraph& g) {
  const std::size_t n = g.num_nodes();
  constexpr int inf = std::numeric_limits<int>::max() / 4;
  std::vector<int> d(n * n, inf);
  for (std::size_t i = 0; i < n; ++i) {
    d[i * n + i] = 0;
    for (auto j : g.adjacency()[i]) d[i * n + j] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        d[i * n + j] = std::min(d[i * n + j], d[i * n + k] + d[k * n + j]);
  for (std::size_t i = 0; i < n; ++i) {
    const auto bfs = g.distances_from(i);
    for (std::size_t j = 0; j < n; ++j) {
      const int expect = d[i * n + j] >= inf ? OntologyGraph::kUnreachable : d[i * n + j];
      if (bfs[j] != expect) return false;
    }
  }
  const auto& c = g.compounds();
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = 0; j < c.size(); ++j) {
      const auto a = *g.node(c[i]);
      const auto b = *g.node(c[j]);
      const int expect = d[a * n + b] >= inf ? OntologyGraph::kUnreachable : d[a * n + b];
      if (g.compound_distance(i, j) != expect) return false;
    }
  }
  return true;
}

struct PlantedClique {
  OntologyGraph graph;
  std::vector<std::vector<std::string>> sets;
};

// `groups` component sets of 6 compounds, each set hanging off one shared
// term (pairwise distance 2). The terms form a long chain so compounds of
// different sets are far apart; 40 decoy compounds sit on the chain too.
inline PlantedClique planted_clique(int groups) {
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<std::string> ids;
  std::vector<std::vector<std::string>> sets;
  const int chain = groups * 10 + 40;
  for (int t = 0; t + 1 < chain; ++t) {
    edges.emplace_back("t" + std::to_string(t), "t" + std::to_string(t + 1));
  }
  for (int g = 0; g < groups; ++g) {
    sets.emplace_back();
    const std::string hub = "t" + std::to_string(g * 10);
    for (int i = 0; i < 6; ++i) {
      const std::string c = "g" + std::to_string(g) + "_" + std::to_string(i);
      edges.emplace_back(c, hub);
      ids.push_back(c);
      sets.back().push_back(c);
    }
  }
  for (int i = 0; i < 40; ++i) {
    const std::string c = "decoy" + std::to_string(i);
    edges.emplace_back(c, "t" + std::to_string((i * 7) % chain));
    ids.push_back(c);
  }
  return {OntologyGraph(edges, ids), sets};
}

}  // namespace gfa::test
