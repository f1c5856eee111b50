#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace cgs::gfchain {

// Graph on at most 16 vertices as adjacency bitmasks.
struct SmallGraph {
  int n = 0;
  std::vector<std::uint16_t> adj;

  bool has_edge(int u, int v) const { return (adj[u] >> v) & 1u; }
  std::vector<std::pair<int, int>> edges() const;
};

struct SmallGraphProfile {
  bool connected = false;
  bool chordal = false;
  int clique_number = 0;
  // Vertex connectivity, except that a complete graph on n vertices gets n
  // (so K_k counts as k-connected).
  int connectivity = 0;
  std::vector<std::uint64_t> cliques;  // cliques[j] = number of j-cliques, chordal graphs only
};

SmallGraphProfile profile(const SmallGraph& g);

bool in_class(const SmallGraphProfile& p, int t, int k);

// Tally of connected chordal graphs on n labelled vertices by
// (clique number, connectivity), with summed clique counts.
struct Census {
  int n = 0;
  struct Cell {
    std::uint64_t graphs = 0;
    std::vector<std::uint64_t> clique_sums;
  };
  std::map<std::pair<int, int>, Cell> cells;

  std::uint64_t count(int t, int k) const;
  // Sum over the class of the number of j-cliques.
  std::uint64_t clique_sum(int t, int k, int j) const;
  bool operator==(const Census& other) const;
};

// Exhaustive over all 2^(n(n-1)/2) graphs; n <= 8.
Census brute_force_census_serial(int n);
Census brute_force_census_parallel(int n);

// Members of the class on n labelled vertices, in increasing edge-mask order.
std::vector<SmallGraph> brute_force_class(int t, int k, int n);

// Rooted class: graphs on n + k vertices in the class in which vertices
// 0..k-1 (the ordered root) form a clique.
std::vector<SmallGraph> brute_force_rooted_class(int t, int k, int n);

}  // namespace cgs::gfchain
