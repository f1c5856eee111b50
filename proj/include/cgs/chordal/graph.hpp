#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace cgs::chordal {

// Simple undirected graph on vertices 0..n-1 with sorted adjacency lists.
//
// Rooted graphs carry their ordered root clique. Labels, when present, give
// each vertex outside the root a distinct label in 1..(n - root size) and the
// root vertices label 0; unrooted labelled graphs use a permutation of 1..n.
struct ChordalGraph {
  int n = 0;
  std::vector<std::vector<int>> adj;
  std::optional<std::vector<int>> root_clique;
  std::optional<std::vector<int>> labels;

  static ChordalGraph from_edges(int n, const std::vector<std::pair<int, int>>& edges);
  static ChordalGraph complete(int n);
  static ChordalGraph path(int n);
  static ChordalGraph cycle(int n);

  bool has_edge(int u, int v) const;
  long long edge_count() const;
  // Each edge once as (u, v) with u < v, sorted.
  std::vector<std::pair<int, int>> edges() const;
};

// Non-root vertices of a labelled rooted graph, or all vertices of an
// unrooted one, keyed by label; root vertices keep their position in the
// root clique. The edge set in these coordinates identifies the labelled
// graph (used to compare samples with exhaustive enumerations).
std::vector<std::pair<int, int>> labelled_edges(const ChordalGraph& g);

// Schema: {"n", "edges", "root_clique" | null, "labels" | null, "seed"}.
// Edges are listed sorted so that output is reproducible.
nlohmann::json to_json(const ChordalGraph& g, std::uint64_t seed);
ChordalGraph from_json(const nlohmann::json& j);
std::string to_dot(const ChordalGraph& g, const std::string& name = "G");

}  // namespace cgs::chordal
