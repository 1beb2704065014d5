#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gfa/random.hpp"

namespace gfa {

// Undirected, unweighted ontology graph over compounds and ontology terms.
class OntologyGraph {
 public:
  static constexpr int kUnreachable = -1;

  // Duplicate edges are collapsed; self-loops and compound ids that do not
  // appear in any edge are rejected with InvalidInput.
  OntologyGraph(const std::vector<std::pair<std::string, std::string>>& edges,
                const std::vector<std::string>& compound_ids);

  std::size_t num_nodes() const { return names_.size(); }
  std::size_t num_edges() const { return num_edges_; }
  const std::vector<std::string>& compounds() const { return compounds_; }
  bool is_compound(const std::string& label) const { return compound_slot_.contains(label); }
  std::optional<std::size_t> node(const std::string& label) const;
  const std::vector<std::vector<std::size_t>>& adjacency() const { return adjacency_; }

  // BFS hop counts from one node; kUnreachable where disconnected.
  std::vector<int> distances_from(std::size_t source) const;

  // Shortest-path length between two compounds (cached), kUnreachable if none.
  int compound_distance(const std::string& u, const std::string& v) const;
  int compound_distance(std::size_t slot_u, std::size_t slot_v) const;
  std::optional<std::size_t> compound_slot(const std::string& label) const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::size_t num_edges_ = 0;
  std::vector<std::string> compounds_;
  std::unordered_map<std::string, std::size_t> compound_slot_;
  std::vector<int> compound_dist_;  // row-major, compounds x compounds
};

OntologyGraph build_graph(const std::vector<std::pair<std::string, std::string>>& edges,
                          const std::vector<std::string>& compound_ids);

// 1/d if the compounds are within max_len hops, else 0.
double pair_similarity(const OntologyGraph& graph, const std::string& u, const std::string& v,
                       int max_len);

struct SetSimilarity {
  double value = 0.0;
  std::size_t retained = 0;
  std::size_t dropped = 0;  // members not among the graph's compounds
};

// Mean pair similarity over distinct pairs of members found in the graph.
// nullopt when fewer than two members remain.
std::optional<SetSimilarity> set_similarity(const OntologyGraph& graph,
                                            const std::vector<std::string>& members, int max_len);

struct SimilarityCurve {
  std::vector<int> lengths;
  std::vector<double> values;
  std::vector<double> baseline_mean;
  std::vector<double> baseline_std;
  std::size_t evaluable_sets = 0;
  std::size_t dropped_members = 0;
};

std::vector<int> default_path_lengths();  // 2..16

// Per length: mean over evaluable sets of the set similarity. Throws
// NoResult when no set has two members in the graph.
SimilarityCurve component_curve(const OntologyGraph& graph,
                                const std::vector<std::vector<std::string>>& member_sets,
                                const std::vector<int>& lengths);

struct BaselineCurve {
  std::vector<double> mean;
  std::vector<double> std;  // sample standard deviation over draws
};

// n_draws collections of uniformly drawn compound sets, size-matched to
// set_sizes; each collection is scored like component_curve.
BaselineCurve random_baseline(const OntologyGraph& graph, const std::vector<std::size_t>& set_sizes,
                              const std::vector<int>& lengths, int n_draws, RandomStream& rng);

}  // namespace gfa
