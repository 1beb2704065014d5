#include "gfa/validation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>

#include "gfa/error.hpp"

namespace gfa {

OntologyGraph::OntologyGraph(const std::vector<std::pair<std::string, std::string>>& edges,
                             const std::vector<std::string>& compound_ids) {
  auto intern = [&](const std::string& label) {
    if (label.empty()) {
      throw InvalidInput("empty node label in edge list");
    }
    auto [it, inserted] = index_.try_emplace(label, names_.size());
    if (inserted) {
      names_.push_back(label);
      adjacency_.emplace_back();
    }
    return it->second;
  };

  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& [a, b] : edges) {
    if (a == b) {
      throw InvalidInput("self-loop on node '" + a + "'");
    }
    const auto u = intern(a);
    const auto v = intern(b);
    if (!seen.insert(std::minmax(u, v)).second) continue;
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
    ++num_edges_;
  }

  for (const auto& c : compound_ids) {
    if (!index_.contains(c)) {
      throw InvalidInput("compound '" + c + "' is not a node of the graph");
    }
    if (compound_slot_.try_emplace(c, compounds_.size()).second) {
      compounds_.push_back(c);
    }
  }

  const std::size_t nc = compounds_.size();
  compound_dist_.assign(nc * nc, kUnreachable);
  for (std::size_t i = 0; i < nc; ++i) {
    const auto dist = distances_from(index_.at(compounds_[i]));
    for (std::size_t j = 0; j < nc; ++j) {
      compound_dist_[i * nc + j] = dist[index_.at(compounds_[j])];
    }
  }
}

std::optional<std::size_t> OntologyGraph::node(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> OntologyGraph::compound_slot(const std::string& label) const {
  auto it = compound_slot_.find(label);
  if (it == compound_slot_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> OntologyGraph::distances_from(std::size_t source) const {
  std::vector<int> dist(names_.size(), kUnreachable);
  std::deque<std::size_t> frontier{source};
  dist[source] = 0;
  while (!frontier.empty()) {
    const auto u = frontier.front();
    frontier.pop_front();
    for (auto v : adjacency_[u]) {
      if (dist[v] == kUnreachable) {
        dist[v] = dist[u] + 1;
        frontier.push_back(v);
      }
    }
  }
  return dist;
}

int OntologyGraph::compound_distance(std::size_t slot_u, std::size_t slot_v) const {
  return compound_dist_[slot_u * compounds_.size() + slot_v];
}

int OntologyGraph::compound_distance(const std::string& u, const std::string& v) const {
  const auto su = compound_slot(u);
  const auto sv = compound_slot(v);
  if (!su || !sv) {
    throw InvalidInput("unknown compound '" + (su ? v : u) + "'");
  }
  return compound_distance(*su, *sv);
}

OntologyGraph build_graph(const std::vector<std::pair<std::string, std::string>>& edges,
                          const std::vector<std::string>& compound_ids) {
  return OntologyGraph(edges, compound_ids);
}

namespace {

double inverse_distance(int d, int max_len) {
  if (d <= 0 || d > max_len) return 0.0;
  return 1.0 / static_cast<double>(d);
}

// Pairwise distances of one set, reused across all length thresholds.
std::vector<int> set_pair_distances(const OntologyGraph& graph,
                                    const std::vector<std::size_t>& slots) {
  std::vector<int> out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    for (std::size_t j = i + 1; j < slots.size(); ++j) {
      out.push_back(graph.compound_distance(slots[i], slots[j]));
    }
  }
  return out;
}

double mean_similarity(const std::vector<int>& dists, int max_len) {
  double s = 0.0;
  for (int d : dists) s += inverse_distance(d, max_len);
  return s / static_cast<double>(dists.size());
}

void check_lengths(const std::vector<int>& lengths) {
  if (lengths.empty()) {
    throw InvalidInput("at least one path length threshold is required");
  }
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (lengths[i] < 1 || (i > 0 && lengths[i] <= lengths[i - 1])) {
      throw InvalidInput("path length thresholds must be positive and strictly increasing");
    }
  }
}

}  // namespace

double pair_similarity(const OntologyGraph& graph, const std::string& u, const std::string& v,
                       int max_len) {
  return inverse_distance(graph.compound_distance(u, v), max_len);
}

std::optional<SetSimilarity> set_similarity(const OntologyGraph& graph,
                                            const std::vector<std::string>& members, int max_len) {
  std::vector<std::size_t> slots;
  std::set<std::size_t> unique;
  SetSimilarity out;
  for (const auto& m : members) {
    const auto slot = graph.compound_slot(m);
    if (!slot) {
      ++out.dropped;
    } else if (unique.insert(*slot).second) {
      slots.push_back(*slot);
    }
  }
  out.retained = slots.size();
  if (slots.size() < 2) return std::nullopt;
  out.value = mean_similarity(set_pair_distances(graph, slots), max_len);
  return out;
}

std::vector<int> default_path_lengths() {
  std::vector<int> v(15);
  std::iota(v.begin(), v.end(), 2);
  return v;
}

SimilarityCurve component_curve(const OntologyGraph& graph,
                                const std::vector<std::vector<std::string>>& member_sets,
                                const std::vector<int>& lengths) {
  check_lengths(lengths);
  SimilarityCurve curve;
  curve.lengths = lengths;
  curve.values.assign(lengths.size(), 0.0);
  for (const auto& members : member_sets) {
    std::vector<std::size_t> slots;
    std::set<std::size_t> unique;
    for (const auto& m : members) {
      const auto slot = graph.compound_slot(m);
      if (!slot) {
        ++curve.dropped_members;
      } else if (unique.insert(*slot).second) {
        slots.push_back(*slot);
      }
    }
    if (slots.size() < 2) continue;
    ++curve.evaluable_sets;
    const auto dists = set_pair_distances(graph, slots);
    for (std::size_t l = 0; l < lengths.size(); ++l) {
      curve.values[l] += mean_similarity(dists, lengths[l]);
    }
  }
  if (curve.evaluable_sets == 0) {
    throw NoResult("no member set has at least two compounds in the graph");
  }
  for (auto& v : curve.values) v /= static_cast<double>(curve.evaluable_sets);
  return curve;
}

BaselineCurve random_baseline(const OntologyGraph& graph, const std::vector<std::size_t>& set_sizes,
                              const std::vector<int>& lengths, int n_draws, RandomStream& rng) {
  check_lengths(lengths);
  if (n_draws < 2) {
    throw InvalidInput("random baseline needs at least 2 draws");
  }
  const std::size_t nc = graph.compounds().size();
  for (auto s : set_sizes) {
    if (s > nc) {
      throw InvalidInput("random set of size " + std::to_string(s) + " exceeds the " +
                         std::to_string(nc) + " compounds in the graph");
    }
    if (s < 2) {
      throw InvalidInput("random sets need at least 2 members");
    }
  }
  if (set_sizes.empty()) {
    throw InvalidInput("random baseline needs at least one set size");
  }

  const std::size_t nl = lengths.size();
  std::vector<double> mean(nl, 0.0);
  std::vector<double> m2(nl, 0.0);
  std::vector<std::size_t> pool(nc);
  std::vector<double> draw_curve(nl);
  for (int draw = 0; draw < n_draws; ++draw) {
    std::fill(draw_curve.begin(), draw_curve.end(), 0.0);
    for (auto size : set_sizes) {
      std::iota(pool.begin(), pool.end(), std::size_t{0});
      // Partial Fisher-Yates: first `size` entries are a uniform subset.
      for (std::size_t i = 0; i < size; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.uniform() * static_cast<double>(nc - i));
        std::swap(pool[i], pool[std::min(j, nc - 1)]);
      }
      const std::vector<std::size_t> slots(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size));
      const auto dists = set_pair_distances(graph, slots);
      for (std::size_t l = 0; l < nl; ++l) {
        draw_curve[l] += mean_similarity(dists, lengths[l]);
      }
    }
    for (std::size_t l = 0; l < nl; ++l) {
      const double v = draw_curve[l] / static_cast<double>(set_sizes.size());
      const double delta = v - mean[l];
      mean[l] += delta / static_cast<double>(draw + 1);
      m2[l] += delta * (v - mean[l]);
    }
  }
  BaselineCurve out;
  out.mean = mean;
  for (std::size_t l = 0; l < nl; ++l) {
    out.std.push_back(std::sqrt(m2[l] / static_cast<double>(n_draws - 1)));
  }
  return out;
}

}  // namespace gfa
