#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "cgs/analytic/analytic.hpp"
#include "cgs/chordal/graph.hpp"
#include "cgs/gfchain/chain.hpp"
#include "cgs/gfchain/float_chain.hpp"
#include "cgs/rng.hpp"
#include "cgs/trees/sampling.hpp"

namespace cgs::chordal {

// A set of (k+1)-connected pieces glued at a shared root k-clique. Vertices
// 0..k-1 are the ordered root, k..k+white-1 the others, numbered in
// construction order.
struct Decoration {
  int k = 0;
  int white = 0;
  std::vector<std::pair<int, int>> edges;  // u < v, sorted, root clique included
  // Non-root k-cliques, each ascending, sorted lexicographically. The i-th
  // black child of the decorated tree vertex hangs on cliques[i].
  std::vector<std::vector<int>> cliques;

  int black() const { return static_cast<int>(cliques.size()); }
  ChordalGraph graph() const;
};

namespace detail {
class CountingSampler;
}

// Uniform decorations and uniform rooted graphs by the recursive counting
// method on the chain's generating functions. Exact counts are used up to
// the chain's component order; past it, decoration sizes fall back to the
// rescaled long double component series, if one is supplied. Safe to share
// between threads.
class DecorationSampler {
 public:
  explicit DecorationSampler(std::shared_ptr<const gfchain::GFChain> chain,
                             std::shared_ptr<const gfchain::FloatComponent> floats = nullptr);

  // DomainError when no decoration has these counts, RangeError past the
  // tabulated sizes.
  Decoration sample(int a, int b, Rng& rng) const;
  // Uniform member of the class rooted at an ordered k-clique with n
  // further vertices, unlabelled (vertices in construction order).
  ChordalGraph sample_rooted(int n, Rng& rng) const;

 private:
  std::shared_ptr<detail::CountingSampler> impl_;
};

Decoration sample_decoration(const gfchain::GFChain& chain, int a, int b, Rng& rng);

// Glues decorations (one per black vertex, in preorder) along the tree. The
// root clique becomes vertices 0..k-1. With label_rng the non-root vertices
// receive a uniform permutation of 1..n. white_vertex, if given, receives
// the graph vertex of every white tree vertex in depth-first order.
// ConsistencyError if a decoration's counts disagree with its tree vertex.
ChordalGraph blow_up(const trees::TwoTypeTree& tree, const std::vector<Decoration>& decorations,
                     Rng* label_rng = nullptr, std::vector<int>* white_vertex = nullptr);

enum class SamplerMode { blowup_rejection, recursive_exact };
enum class DerootMode { forget, reweight };

struct SamplerOptions {
  int chain_order = 40;
  double tol = 1e-9;
  std::optional<int> cutoff;
  double eps = analytic::kDefaultDeficit;
  long long max_attempts = 1LL << 40;
};

// Prepared state for repeated samples from one class. The singularity,
// offspring law and tree sampler are computed on first use by the blow-up
// path. Safe to share between threads.
class GraphSampler {
 public:
  GraphSampler(int t, int k, SamplerOptions options = {});

  int t() const { return t_; }
  int k() const { return k_; }
  const gfchain::GFChain& chain() const { return *chain_; }
  const analytic::Singularity& singularity() const;
  const analytic::OffspringLaw& law() const;
  const trees::OffspringSampler& tree_sampler() const;
  const DecorationSampler& decorations() const;

  struct Coupled {
    trees::TwoTypeTree tree;
    std::vector<Decoration> decorations;
    ChordalGraph graph;
    std::vector<int> white_vertex;
  };
  // Blow-up sample keeping the tree it came from; labels attached.
  Coupled sample_coupled(long long n, Rng& rng) const;
  // Labelled uniform member rooted at an ordered k-clique, n further vertices.
  ChordalGraph sample(long long n, SamplerMode mode, Rng& rng) const;

 private:
  void prepare() const;

  int t_, k_;
  SamplerOptions options_;
  std::shared_ptr<const gfchain::GFChain> chain_;
  std::shared_ptr<const DecorationSampler> exact_;
  mutable std::once_flag prepared_;
  mutable analytic::Singularity singularity_;
  mutable analytic::OffspringLaw law_;
  mutable std::unique_ptr<trees::OffspringSampler> tree_sampler_;
  mutable std::shared_ptr<const DecorationSampler> decorations_;
};

ChordalGraph sample_graph(int t, int k, long long n, SamplerMode mode, Rng& rng);

// (k(N - k) + 1) / n_k(g) for a graph on N vertices with root size k: the
// acceptance probability of the reweighting de-rooter.
double deroot_acceptance(const ChordalGraph& g);

// forget drops the root clique and the labels and keeps the structure.
// reweight keeps the graph with probability deroot_acceptance(g), otherwise
// returns nullopt, and labels all vertices by a uniform permutation of 1..N.
std::optional<ChordalGraph> deroot(const ChordalGraph& g, DerootMode mode, Rng& rng);

// Uniform labelled unrooted member on `vertices` vertices (reweight) or the
// forgetful approximation to it, retrying rejected draws.
ChordalGraph sample_unrooted(const GraphSampler& sampler, long long vertices, SamplerMode mode,
                             DerootMode deroot_mode, Rng& rng, long long max_attempts = 1000000);

}  // namespace cgs::chordal
