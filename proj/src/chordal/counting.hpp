#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "cgs/gfchain/chain.hpp"
#include "cgs/gfchain/float_chain.hpp"
#include "cgs/rng.hpp"

namespace cgs::chordal::detail {

using Exponent = std::vector<int>;
using Counts = std::map<Exponent, mpz_class>;

// Graph under construction: vertices 0..root-1 are the ordered root clique.
struct LocalGraph {
  explicit LocalGraph(int root_size);
  int root = 0;
  int n = 0;
  std::vector<std::pair<int, int>> edges;

  int add_vertex() { return n++; }
  void add_edge(int u, int v) { edges.emplace_back(std::min(u, v), std::max(u, v)); }
};

// Non-root j-cliques (j = root size), each ascending, sorted.
std::vector<std::vector<int>> nonroot_cliques(const LocalGraph& g);

class CountingSampler {
 public:
  CountingSampler(std::shared_ptr<const gfchain::GFChain> chain,
                  std::shared_ptr<const gfchain::FloatComponent> floats);

  // Decoration at the last level with a non-root k-cliques and b non-root
  // vertices.
  LocalGraph decoration(int a, int b, Rng& rng) const;
  // Rooted member of the class with n non-root vertices, from exact counts
  // at every level.
  LocalGraph rooted(int n, Rng& rng) const;

 private:
  // Labelled counts at level j over the level variables.
  struct Level {
    int j = 0;
    std::vector<int> vars;
    std::size_t marked = 0;  // index of x_j among vars
    Counts rooted;           // rooted class
    Counts logs;             // component with its hanging rooted graphs
    Counts comps;            // components
  };
  // Labelled powers of the rooted series, restricted to exponents <= cap.
  struct Powers {
    Exponent cap;
    std::vector<std::shared_ptr<const Counts>> p;
  };
  struct Choice {
    int a, b;
  };
  struct ExactSplit {
    std::vector<Choice> choices;
    std::vector<mpz_class> cumulative;
  };
  struct FloatSplit {
    std::vector<Choice> choices;
    std::vector<long double> cumulative;
  };

  std::shared_ptr<const Level> level(int j) const;
  std::shared_ptr<const Counts> power(int j, int m, const Exponent& need) const;

  void attach_rooted(LocalGraph& g, const std::vector<int>& root, int j, Exponent q, Rng& rng,
                     bool fast) const;
  void attach_piece(LocalGraph& g, const std::vector<int>& root, int j, const Exponent& q,
                    Rng& rng) const;
  void attach_ktree(LocalGraph& g, const std::vector<int>& root, int m, Rng& rng) const;
  // Component at level j with exponent e over the level variables.
  LocalGraph component(int j, const Exponent& e, Rng& rng) const;
  LocalGraph component_of_size(int a, int b, Rng& rng) const;

  std::shared_ptr<const ExactSplit> exact_split(int a, int b) const;
  std::shared_ptr<const FloatSplit> float_split(int a, int b) const;
  void extend_float_sets(int b) const;

  std::shared_ptr<const gfchain::GFChain> chain_;
  std::shared_ptr<const gfchain::FloatComponent> floats_;
  int t_, k_;

  mutable std::mutex mutex_;
  mutable std::map<int, std::shared_ptr<const Level>> levels_;
  mutable std::map<int, Powers> powers_;
  mutable std::map<std::pair<int, int>, std::shared_ptr<const ExactSplit>> exact_splits_;
  mutable std::map<std::pair<int, int>, std::shared_ptr<const FloatSplit>> float_splits_;
  // Last-level component and set series in rescaled long double, indexed
  // [b][a]; sets_ grows on demand.
  std::vector<std::map<int, long double>> float_comps_;
  mutable std::vector<std::map<int, long double>> float_sets_;
  std::map<std::pair<int, int>, mpz_class> exact_comps_;  // (a, b) -> labelled count
  std::shared_ptr<const std::map<std::pair<int, int>, mpz_class>> exact_sets_;
};

}  // namespace cgs::chordal::detail
