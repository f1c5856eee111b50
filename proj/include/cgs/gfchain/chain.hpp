#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "cgs/series/multi_series.hpp"

namespace cgs::gfchain {

using series::MultiSeries;

struct ChainOptions {
  // x1-order of every level above the last one, and of the component series
  // of the last level. Defaults to the requested order. A larger value is
  // needed by offspring tables and by counts past the tabulated order.
  int component_order = -1;
  // Track the clique counts x2..x_{t-1} as well; otherwise only x1 and x_k
  // (plus the level variables used while solving) are kept.
  bool track_all_cliques = false;
  bool parallel = true;
};

inline std::string var_name(int i) { return "x" + std::to_string(i); }

// Exact generating functions for k-connected chordal graphs of treewidth at
// most t, from the clique of size t+1 down to level k.
//
// For level j in [k, t]:
//   rooted(j)    graphs of the class rooted at an ordered j-clique,
//                x1 counts the non-root vertices;
//   component(j) the (j+1)-connected blocks rooted at a j-clique, i.e. the
//                series composed into the implicit equation at level j;
//   unrooted(j)  the class itself (j in [k, t+1]).
class GFChain {
 public:
  int t() const { return t_; }
  int k() const { return k_; }
  int order() const { return order_; }
  int component_order() const { return component_order_; }
  bool tracks_all_cliques() const { return all_; }

  const MultiSeries& rooted(int j) const;
  const MultiSeries& component(int j) const;
  const MultiSeries& unrooted(int j) const;

  // Variables kept at level j, ascending clique size.
  std::vector<int> level_variables(int j) const;
  // Bound on the exponent of x_i anywhere in the chain.
  int clique_bound(int i) const;

  // Largest n for which rooted counts can be produced exactly (beyond
  // order() this uses Lagrange inversion on the component series, k = 1).
  int exact_range() const;

 private:
  friend GFChain build_chain(int t, int k, int order, const ChainOptions& options);
  friend std::shared_ptr<const std::map<std::pair<int, int>, mpz_class>> decoration_table(
      const GFChain&, int, int);

  int t_ = 0, k_ = 0, order_ = 0, component_order_ = 0;
  bool all_ = false;
  std::map<int, MultiSeries> rooted_, component_, unrooted_;
  std::vector<int> clique_bounds_;

  struct DecorationCache {
    std::mutex mutex;
    int max_a = -1, max_b = -1;
    std::shared_ptr<const std::map<std::pair<int, int>, mpz_class>> table;
  };
  std::shared_ptr<DecorationCache> decorations_ = std::make_shared<DecorationCache>();
};

GFChain build_chain(int t, int k, int order, const ChainOptions& options = {});

// Number of graphs on n labelled vertices (unrooted), or rooted at an ordered
// k-clique with n further labelled vertices (rooted).
mpz_class count(const GFChain& chain, int n, bool rooted);

// Labelled count of sets of level-k components with b non-root vertices and
// a non-root k-cliques in total: b! [x_k^a x1^b] exp(component(k)).
mpz_class decoration_count(const GFChain& chain, int a, int b);

// All nonzero decoration counts keyed by (a, b), covering at least
// a <= max_a and b <= max_b. The snapshot stays valid after later extensions.
std::shared_ptr<const std::map<std::pair<int, int>, mpz_class>> decoration_table(
    const GFChain& chain, int max_a, int max_b);

// Labelled coefficients n! [x1^n] of a series with all other variables set
// to 1. The series must be exact in every variable other than x1.
std::vector<mpz_class> labelled_counts(const MultiSeries& s);

// Rooted count for k = 1 via Lagrange inversion of Y = exp(H(x Y)), using the
// component series only. Needs n <= component_order().
mpz_class rooted_count_lagrange(const GFChain& chain, int n);

}  // namespace cgs::gfchain
