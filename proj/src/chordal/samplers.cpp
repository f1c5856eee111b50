#include <algorithm>
#include <limits>
#include <numeric>

#include "cgs/chordal/algorithms.hpp"
#include "cgs/chordal/samplers.hpp"
#include "cgs/errors.hpp"
#include "counting.hpp"

namespace cgs::chordal {

namespace {

std::vector<int> iota_vector(int n, int from) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), from);
  return v;
}

Decoration to_decoration(const detail::LocalGraph& g) {
  Decoration d;
  d.k = g.root;
  d.white = g.n - g.root;
  d.edges = g.edges;
  std::sort(d.edges.begin(), d.edges.end());
  d.edges.erase(std::unique(d.edges.begin(), d.edges.end()), d.edges.end());
  d.cliques = detail::nonroot_cliques(g);
  return d;
}

}  // namespace

ChordalGraph Decoration::graph() const {
  auto g = ChordalGraph::from_edges(k + white, edges);
  g.root_clique = iota_vector(k, 0);
  return g;
}

DecorationSampler::DecorationSampler(std::shared_ptr<const gfchain::GFChain> chain,
                                     std::shared_ptr<const gfchain::FloatComponent> floats)
    : impl_(std::make_shared<detail::CountingSampler>(std::move(chain), std::move(floats))) {}

Decoration DecorationSampler::sample(int a, int b, Rng& rng) const {
  return to_decoration(impl_->decoration(a, b, rng));
}

ChordalGraph DecorationSampler::sample_rooted(int n, Rng& rng) const {
  const auto local = impl_->rooted(n, rng);
  auto g = ChordalGraph::from_edges(local.n, local.edges);
  g.root_clique = iota_vector(local.root, 0);
  return g;
}

Decoration sample_decoration(const gfchain::GFChain& chain, int a, int b, Rng& rng) {
  // Non-owning: the sampler does not outlive this call.
  std::shared_ptr<const gfchain::GFChain> ref(&chain, [](const gfchain::GFChain*) {});
  return DecorationSampler(ref).sample(a, b, rng);
}

ChordalGraph blow_up(const trees::TwoTypeTree& tree, const std::vector<Decoration>& decorations,
                     Rng* label_rng, std::vector<int>* white_vertex) {
  if (decorations.size() != tree.black.size())
    throw ConsistencyError("one decoration per black vertex expected");
  if (decorations.empty()) throw DomainError("empty tree");
  const int k = decorations[0].k;
  long long total = k;
  for (int w : tree.white) total += w;
  if (total > std::numeric_limits<int>::max()) throw OverflowError("graph too large");
  const int n = static_cast<int>(total);

  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < k; ++u)
    for (int v = u + 1; v < k; ++v) edges.emplace_back(u, v);
  if (white_vertex) white_vertex->clear();

  struct Frame {
    std::vector<std::vector<int>> targets;
    std::size_t next = 0;
  };
  std::vector<Frame> frames;
  int next_id = k;
  std::vector<int> id;
  for (std::size_t v = 0; v < tree.black.size(); ++v) {
    const Decoration& d = decorations[v];
    if (d.k != k || d.white != tree.white[v] || d.black() != tree.black[v])
      throw ConsistencyError("decoration does not match its tree vertex");
    std::vector<int> target;
    if (v == 0) {
      target = iota_vector(k, 0);
    } else {
      while (frames.back().next == frames.back().targets.size()) frames.pop_back();
      target = frames.back().targets[frames.back().next++];
    }
    id.assign(k + d.white, 0);
    for (int i = 0; i < k; ++i) id[i] = target[i];
    for (int r = 0; r < d.white; ++r) {
      id[k + r] = next_id++;
      if (white_vertex) white_vertex->push_back(id[k + r]);
    }
    for (auto [a, b] : d.edges)
      if (a >= k || b >= k) edges.emplace_back(id[a], id[b]);
    if (d.cliques.empty()) continue;
    Frame f;
    for (const auto& c : d.cliques) {
      std::vector<int> g;
      for (int x : c) g.push_back(id[x]);
      f.targets.push_back(std::move(g));
    }
    frames.push_back(std::move(f));
  }

  auto g = ChordalGraph::from_edges(n, edges);
  g.root_clique = iota_vector(k, 0);
  if (label_rng) {
    auto perm = iota_vector(n - k, 1);
    label_rng->shuffle(perm.begin(), perm.end());
    std::vector<int> labels(n, 0);
    std::copy(perm.begin(), perm.end(), labels.begin() + k);
    g.labels = std::move(labels);
  }
  return g;
}

GraphSampler::GraphSampler(int t, int k, SamplerOptions options)
    : t_(t), k_(k), options_(std::move(options)) {
  if (options_.chain_order < 1) throw ConfigurationError("chain order must be positive");
  chain_ = std::make_shared<const gfchain::GFChain>(gfchain::build_chain(t, k, options_.chain_order));
  exact_ = std::make_shared<const DecorationSampler>(chain_);
}

void GraphSampler::prepare() const {
  std::call_once(prepared_, [this] {
    singularity_ = analytic::find_singularity(*chain_, {.tol = options_.tol});
    law_ = analytic::offspring_law(*chain_, singularity_, options_.cutoff, options_.eps);
    tree_sampler_ = std::make_unique<trees::OffspringSampler>(law_);
    decorations_ = std::make_shared<const DecorationSampler>(chain_, singularity_.component);
  });
}

const analytic::Singularity& GraphSampler::singularity() const {
  prepare();
  return singularity_;
}
const analytic::OffspringLaw& GraphSampler::law() const {
  prepare();
  return law_;
}
const trees::OffspringSampler& GraphSampler::tree_sampler() const {
  prepare();
  return *tree_sampler_;
}
const DecorationSampler& GraphSampler::decorations() const {
  prepare();
  return *decorations_;
}

GraphSampler::Coupled GraphSampler::sample_coupled(long long n, Rng& rng) const {
  if (n < 1) throw DomainError("need at least one non-root vertex");
  Coupled c;
  c.tree = trees::sample_conditioned(tree_sampler(), n, rng, options_.max_attempts);
  c.decorations.reserve(c.tree.black.size());
  for (std::size_t v = 0; v < c.tree.black.size(); ++v)
    c.decorations.push_back(decorations().sample(c.tree.black[v], c.tree.white[v], rng));
  c.graph = blow_up(c.tree, c.decorations, &rng, &c.white_vertex);
  return c;
}

ChordalGraph GraphSampler::sample(long long n, SamplerMode mode, Rng& rng) const {
  if (mode == SamplerMode::blowup_rejection) return sample_coupled(n, rng).graph;
  if (n < 0 || n > chain_->order()) throw RangeError("size beyond the chain order");
  auto g = exact_->sample_rooted(static_cast<int>(n), rng);
  auto perm = iota_vector(g.n - k_, 1);
  rng.shuffle(perm.begin(), perm.end());
  std::vector<int> labels(g.n, 0);
  std::copy(perm.begin(), perm.end(), labels.begin() + k_);
  g.labels = std::move(labels);
  return g;
}

ChordalGraph sample_graph(int t, int k, long long n, SamplerMode mode, Rng& rng) {
  SamplerOptions options;
  if (mode == SamplerMode::recursive_exact)
    options.chain_order = static_cast<int>(std::max<long long>(n, 1));
  return GraphSampler(t, k, options).sample(n, mode, rng);
}

double deroot_acceptance(const ChordalGraph& g) {
  if (!g.root_clique) throw DomainError("graph has no root clique");
  const long long k = static_cast<long long>(g.root_clique->size());
  const long long cliques = clique_count(g, static_cast<int>(k));
  return static_cast<double>(k * (g.n - k) + 1) / static_cast<double>(cliques);
}

std::optional<ChordalGraph> deroot(const ChordalGraph& g, DerootMode mode, Rng& rng) {
  if (!g.root_clique) throw DomainError("graph has no root clique");
  ChordalGraph out = g;
  out.root_clique.reset();
  out.labels.reset();
  if (mode == DerootMode::forget) return out;
  if (rng.uniform01() >= deroot_acceptance(g)) return std::nullopt;
  auto perm = iota_vector(g.n, 1);
  rng.shuffle(perm.begin(), perm.end());
  out.labels = std::move(perm);
  return out;
}

ChordalGraph sample_unrooted(const GraphSampler& sampler, long long vertices, SamplerMode mode,
                             DerootMode deroot_mode, Rng& rng, long long max_attempts) {
  const long long n = vertices - sampler.k();
  if (n < 0) throw DomainError("fewer vertices than the root clique");
  for (long long attempt = 0; attempt < max_attempts; ++attempt) {
    auto g = deroot(sampler.sample(n, mode, rng), deroot_mode, rng);
    if (!g) continue;
    if (!g->labels) {
      auto perm = iota_vector(g->n, 1);
      rng.shuffle(perm.begin(), perm.end());
      g->labels = std::move(perm);
    }
    return std::move(*g);
  }
  throw ResourceError("de-rooting rejected every draw");
}

}  // namespace cgs::chordal
