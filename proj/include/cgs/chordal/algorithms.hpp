#pragma once

#include <optional>
#include <vector>

#include "cgs/chordal/graph.hpp"

namespace cgs::chordal {

// Lexicographic breadth-first search; returns the visit order.
std::vector<int> lex_bfs(const ChordalGraph& g);
// Maximum cardinality search visit order (also a reverse elimination order
// for chordal graphs, cheaper than lex_bfs).
std::vector<int> mcs(const ChordalGraph& g);
// True when every vertex's neighbours later in the order form a clique.
bool is_perfect_elimination(const ChordalGraph& g, const std::vector<int>& order);
// A perfect elimination ordering, or nullopt if g is not chordal.
std::optional<std::vector<int>> perfect_elimination_order(const ChordalGraph& g);

bool is_connected(const ChordalGraph& g);
// Vertex connectivity of a chordal graph: the smallest minimal separator,
// n - 1 for complete graphs, 0 when disconnected. Requires g chordal.
int chordal_connectivity(const ChordalGraph& g);
// At least k vertex-disjoint paths between every pair, by unit-capacity
// max-flow over the pairs of Even's algorithm. Complete graphs on at least
// k vertices count as k-connected.
bool is_k_connected(const ChordalGraph& g, int k);

struct MemberReport {
  bool chordal = false;
  int clique_number = 0;   // 0 when not chordal
  int connectivity = 0;    // from the clique tree; 0 when not chordal
  bool k_connected = false;  // max-flow check
  bool root_is_clique = true;
  bool member = false;     // all of the above within the class
};

MemberReport verify_member(const ChordalGraph& g, int t, int k);

// Number of j-cliques; DomainError if g is not chordal.
long long clique_count(const ChordalGraph& g, int j);
// All j-cliques of a chordal graph, each sorted ascending, in
// lexicographic order.
std::vector<std::vector<int>> cliques(const ChordalGraph& g, int j);

// Breadth-first distances (-1 for unreachable vertices).
std::vector<int> bfs(const ChordalGraph& g, int source);
// Rows follow sources; DomainError if g is disconnected.
std::vector<std::vector<int>> distances(const ChordalGraph& g, const std::vector<int>& sources);

enum class DiameterMethod {
  all_sources,
  // Iterative fringe upper bound: a double sweep for a lower bound, then
  // BFS from the far levels of a central vertex until the bounds meet.
  ifub,
};
// DomainError if g is disconnected.
int diameter(const ChordalGraph& g, DiameterMethod method = DiameterMethod::ifub);

}  // namespace cgs::chordal
