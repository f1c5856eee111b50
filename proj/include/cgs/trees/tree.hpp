#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cgs/analytic/analytic.hpp"

namespace cgs::trees {

using analytic::OffspringLaw;

// Two-type plane tree stored as its depth-first (preorder) sequence of black
// vertices; vertex 0 is the root. Each black vertex records how many black
// and how many white children it has. White vertices are leaves and are not
// stored: the s-th white child of black vertex v is the pair (v, s), and
// white vertices are numbered depth-first by visiting the white children of
// v when v is visited.
struct TwoTypeTree {
  std::vector<int> black;
  std::vector<int> white;

  static TwoTypeTree single_root() { return {{0}, {0}}; }

  int black_count() const { return static_cast<int>(black.size()); }
  long long white_count() const;
  // Preorder sequence is a valid encoding (exactly one tree, nonempty).
  bool valid() const;
  bool operator==(const TwoTypeTree&) const = default;
};

// Navigation data derived from the preorder sequence.
struct TreeIndex {
  explicit TreeIndex(const TwoTypeTree& tree);

  std::vector<int> parent;  // -1 at the root
  std::vector<int> depth;   // root has depth 0
  std::vector<int> end;     // subtree of v is the preorder range [v, end[v])
  std::vector<long long> first_white;  // depth-first number of (v, 0)

  // Black children of v in order.
  std::vector<int> children(int v) const;
};

// Largest depth over all vertices; a white child sits one below its parent.
int height(const TwoTypeTree& tree);

// A tree with a marked white vertex (mark_parent, mark_slot). The lone white
// vertex (the fringe at height 0) has no black vertices and mark_parent -1.
// spine lists the black ancestors of the mark from the root down, when the
// tree came from the spine construction.
struct MarkedTree {
  TwoTypeTree tree;
  int mark_parent = -1;
  int mark_slot = 0;
  std::vector<int> spine;

  static MarkedTree lone_white() { return {}; }
  bool is_lone_white() const { return tree.black.empty(); }
  // Height of the marked vertex.
  int mark_height() const;
  // Canonical text key: "*" for the lone white vertex, otherwise the
  // preorder (black,white) pairs followed by the mark.
  std::string key() const;
  bool operator==(const MarkedTree& o) const {
    return tree == o.tree && mark_parent == o.mark_parent && mark_slot == o.mark_slot;
  }
};

// Fringe subtree at the h-th ancestor of the mark, mark kept. nullopt is the
// placeholder for marks of height below h.
std::optional<MarkedTree> fringe(const MarkedTree& tree, int h);

// P(T = tau without mark) / E[white children]: the limiting probability that
// the fringe of a uniform white vertex equals tau. DomainError for an
// invalid tree or a mark outside it.
double fringe_probability(const OffspringLaw& law, const MarkedTree& tau);

// Fringe subtrees of height h over all white vertices of a tree. Subtrees
// with more than max_black black vertices are lumped into `other`; white
// vertices below height h are counted in `undefined`.
struct FringeCensus {
  std::map<std::string, long long> counts;
  long long other = 0;
  long long undefined = 0;
};
FringeCensus fringe_census(const TwoTypeTree& tree, int h, int max_black);

// All marked trees with fringe height exactly h (h = 0 or 1 gives every
// tree; mark at depth h - 1) and at most max_black black vertices whose
// vertices have offspring in the support of law. Used to build the
// theoretical side of fringe comparisons.
std::vector<MarkedTree> enumerate_fringes(const OffspringLaw& law, int h, int max_black);

struct DegreeProfile {
  std::map<int, long long> black_degree;  // d -> number of black vertices with d black children
  int max_black_degree = 0;
  int max_white_degree = 0;
  long long position = 0;         // ceil(U * #black)
  long long parent_position = 0;  // preorder position of the parent of white vertex ceil(U * n)
};

// Positions are 1-based; u in [0, 1] (u = 0 is treated as the first vertex).
DegreeProfile degree_profile(const TwoTypeTree& tree, double u);

}  // namespace cgs::trees
