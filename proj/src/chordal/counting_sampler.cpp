#include <algorithm>
#include <numeric>

#include "cgs/chordal/algorithms.hpp"
#include "cgs/errors.hpp"
#include "cgs/trees/sampling.hpp"
#include "counting.hpp"

namespace cgs::chordal::detail {

namespace {

mpz_class binom(long n, long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

mpz_class factorial(long n) {
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
  return r;
}

bool leq(const Exponent& a, const Exponent& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

Exponent minus(const Exponent& a, const Exponent& b) {
  Exponent r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

bool is_zero(const Exponent& e) {
  return std::all_of(e.begin(), e.end(), [](int x) { return x == 0; });
}

const mpz_class& lookup(const Counts& c, const Exponent& e) {
  static const mpz_class zero = 0;
  auto it = c.find(e);
  return it == c.end() ? zero : it->second;
}

// n! [x1^n ...] with x1 first among the variables.
Counts labelled(const series::MultiSeries& s) {
  if (s.index_of("x1") != 0) throw ConsistencyError("x1 must be the first level variable");
  Counts out;
  for (const auto& [e, c] : s.terms()) {
    mpq_class v = c * factorial(e[0]);
    if (v.get_den() != 1) throw ConsistencyError("labelled count is not an integer");
    out[e] = v.get_num();
  }
  return out;
}

// Labelled (binomial) product restricted to exponents <= cap.
Counts product(const Counts& a, const Counts& b, const Exponent& cap) {
  Counts out;
  for (const auto& [ea, ca] : a) {
    if (!leq(ea, cap)) continue;
    for (const auto& [eb, cb] : b) {
      Exponent e(ea.size());
      bool ok = true;
      for (std::size_t i = 0; i < e.size() && ok; ++i) {
        e[i] = ea[i] + eb[i];
        ok = e[i] <= cap[i];
      }
      if (!ok) continue;
      out[e] += binom(e[0], ea[0]) * ca * cb;
    }
  }
  return out;
}

template <class T>
std::size_t pick(const std::vector<T>& cumulative, const T& u) {
  return static_cast<std::size_t>(
      std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
}

std::size_t pick_exact(const std::vector<mpz_class>& cumulative, Rng& rng) {
  return pick(cumulative, rng.below(cumulative.back()));
}

ChordalGraph as_graph(const LocalGraph& g) { return ChordalGraph::from_edges(g.n, g.edges); }

// Copies `part` into g, identifying part's root with `root`. Returns the
// global id of every vertex of part.
std::vector<int> merge(LocalGraph& g, const LocalGraph& part, const std::vector<int>& root) {
  std::vector<int> id(part.n);
  for (int i = 0; i < part.root; ++i) id[i] = root[i];
  for (int v = part.root; v < part.n; ++v) id[v] = g.add_vertex();
  for (auto [u, v] : part.edges)
    if (u >= part.root || v >= part.root) g.add_edge(id[u], id[v]);
  return id;
}

}  // namespace

LocalGraph::LocalGraph(int root_size) : root(root_size), n(root_size) {
  for (int u = 0; u < root_size; ++u)
    for (int v = u + 1; v < root_size; ++v) edges.emplace_back(u, v);
}

std::vector<std::vector<int>> nonroot_cliques(const LocalGraph& g) {
  if (g.root == 0) return {};
  std::vector<int> root(g.root);
  std::iota(root.begin(), root.end(), 0);
  auto all = cliques(as_graph(g), g.root);
  all.erase(std::remove(all.begin(), all.end(), root), all.end());
  return all;
}

CountingSampler::CountingSampler(std::shared_ptr<const gfchain::GFChain> chain,
                                 std::shared_ptr<const gfchain::FloatComponent> floats)
    : chain_(std::move(chain)), floats_(std::move(floats)), t_(chain_->t()), k_(chain_->k()) {
  const auto vars = chain_->level_variables(k_);
  std::size_t xk = 0;
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i] == k_) xk = i;
  for (const auto& [e, c] : labelled(chain_->component(k_)))
    exact_comps_[{e[xk], e[0]}] += c;
  const int max_b = chain_->component_order();
  exact_sets_ =
      gfchain::decoration_table(*chain_, k_ == 1 ? max_b : chain_->clique_bound(k_), max_b);
  if (floats_) {
    float_comps_.resize(floats_->order + 1);
    for (const auto& [key, v] : floats_->terms)
      if (key.first <= floats_->order) float_comps_[key.first][key.second] += v;
  }
  float_sets_.push_back({{0, 1.0L}});
}

std::shared_ptr<const CountingSampler::Level> CountingSampler::level(int j) const {
  std::lock_guard lock(mutex_);
  if (auto it = levels_.find(j); it != levels_.end()) return it->second;
  auto L = std::make_shared<Level>();
  L->j = j;
  L->vars = chain_->level_variables(j);
  for (std::size_t i = 0; i < L->vars.size(); ++i)
    if (L->vars[i] == j) L->marked = i;
  L->rooted = labelled(chain_->rooted(j));
  L->comps = labelled(chain_->component(j));
  // log of the rooted series, labelled: g = sum over set partitions, so
  // tau(q) = g(q) - sum_{q' < q} C(q1 - 1, q'1 - 1) tau(q') g(q - q').
  for (const auto& [q, gq] : L->rooted) {
    if (q[0] == 0) continue;
    mpz_class v = gq;
    for (const auto& [qp, tp] : L->logs) {
      if (qp[0] > q[0]) break;
      if (qp == q || !leq(qp, q)) continue;
      const mpz_class& rest = lookup(L->rooted, minus(q, qp));
      if (sgn(rest) != 0) v -= binom(q[0] - 1, qp[0] - 1) * tp * rest;
    }
    if (sgn(v) < 0) throw ConsistencyError("negative log count");
    if (sgn(v) != 0) L->logs[q] = v;
  }
  levels_[j] = L;
  return L;
}

std::shared_ptr<const Counts> CountingSampler::power(int j, int m, const Exponent& need) const {
  auto L = level(j);
  std::lock_guard lock(mutex_);
  Powers& P = powers_[j];
  if (P.p.empty()) {
    P.cap = need;
    Exponent zero(need.size(), 0);
    P.p.push_back(std::make_shared<const Counts>(Counts{{zero, 1}}));
  }
  if (!leq(need, P.cap)) {
    for (std::size_t i = 0; i < need.size(); ++i) P.cap[i] = std::max(P.cap[i], need[i]);
    const std::size_t top = P.p.size();
    P.p.resize(1);
    while (P.p.size() < top) P.p.push_back(std::make_shared<const Counts>(product(*P.p.back(), L->rooted, P.cap)));
  }
  while (static_cast<int>(P.p.size()) <= m)
    P.p.push_back(std::make_shared<const Counts>(product(*P.p.back(), L->rooted, P.cap)));
  return P.p[m];
}

void CountingSampler::attach_rooted(LocalGraph& g, const std::vector<int>& root, int j, Exponent q,
                                    Rng& rng, bool fast) const {
  if (is_zero(q)) return;
  if (fast && j == t_) {
    attach_ktree(g, root, q[0], rng);
    return;
  }
  auto L = level(j);
  const mpz_class expected = lookup(L->rooted, q);
  if (sgn(expected) == 0) throw ConsistencyError("no rooted graph with these counts");
  // Split off the piece holding the smallest non-root label.
  while (q[0] > 0) {
    std::vector<const Exponent*> choices;
    std::vector<mpz_class> cumulative;
    mpz_class total = 0;
    for (const auto& [qp, tp] : L->logs) {
      if (qp[0] > q[0]) break;
      if (!leq(qp, q)) continue;
      const mpz_class& rest = lookup(L->rooted, minus(q, qp));
      if (sgn(rest) == 0) continue;
      total += binom(q[0] - 1, qp[0] - 1) * tp * rest;
      choices.push_back(&qp);
      cumulative.push_back(total);
    }
    if (total != lookup(L->rooted, q)) throw ConsistencyError("rooted split does not add up");
    const Exponent piece = *choices[pick_exact(cumulative, rng)];
    attach_piece(g, root, j, piece, rng);
    q = minus(q, piece);
  }
  if (!is_zero(q)) throw ConsistencyError("rooted graph left clique counts over");
}

void CountingSampler::attach_piece(LocalGraph& g, const std::vector<int>& root, int j,
                                   const Exponent& q, Rng& rng) const {
  auto L = level(j);
  const std::size_t mk = L->marked;
  // Component e at the root, then m rooted graphs on its non-root j-cliques
  // sharing the remaining counts.
  std::vector<const Exponent*> choices;
  std::vector<mpz_class> cumulative;
  mpz_class total = 0;
  for (const auto& [e, h] : L->comps) {
    if (e[0] == 0 || e[0] > q[0] || !leq(e, q)) continue;
    const Exponent rest = minus(q, e);
    const int m = j == 1 ? e[0] : e[mk];
    const mpz_class& p = lookup(*power(j, m, rest), rest);
    if (sgn(p) == 0) continue;
    total += binom(q[0], e[0]) * h * p;
    choices.push_back(&e);
    cumulative.push_back(total);
  }
  if (total != lookup(L->logs, q)) throw ConsistencyError("component split does not add up");
  const Exponent e = *choices[pick_exact(cumulative, rng)];
  const int m = j == 1 ? e[0] : e[mk];

  const LocalGraph comp = component(j, e, rng);
  const auto id = merge(g, comp, root);
  const auto local = nonroot_cliques(comp);
  if (static_cast<int>(local.size()) != m) throw ConsistencyError("component clique count");

  Exponent rest = minus(q, e);
  for (int i = 0; i < m; ++i) {
    auto rem = power(j, m - i - 1, rest);
    std::vector<const Exponent*> rs;
    std::vector<mpz_class> cum;
    mpz_class tot = 0;
    for (const auto& [r, gr] : L->rooted) {
      if (r[0] > rest[0]) break;
      if (!leq(r, rest)) continue;
      const mpz_class& p = lookup(*rem, minus(rest, r));
      if (sgn(p) == 0) continue;
      tot += binom(rest[0], r[0]) * gr * p;
      rs.push_back(&r);
      cum.push_back(tot);
    }
    if (tot != lookup(*power(j, m - i, rest), rest))
      throw ConsistencyError("child split does not add up");
    const Exponent r = *rs[pick_exact(cum, rng)];
    std::vector<int> target;
    for (int v : local[i]) target.push_back(id[v]);
    attach_rooted(g, target, j, r, rng, true);
    rest = minus(rest, r);
  }
}

void CountingSampler::attach_ktree(LocalGraph& g, const std::vector<int>& root, int m,
                                   Rng& rng) const {
  if (m == 0) return;
  const auto tree = trees::sample_poisson_conditioned(t_, m, rng);
  struct Frame {
    std::vector<std::vector<int>> targets;
    std::size_t next = 0;
  };
  std::vector<Frame> frames;
  for (std::size_t v = 0; v < tree.black.size(); ++v) {
    std::vector<int> target;
    if (v == 0) {
      target = root;
    } else {
      while (frames.back().next == frames.back().targets.size()) frames.pop_back();
      target = frames.back().targets[frames.back().next++];
    }
    const int s = tree.white[v];
    std::vector<int> fresh(s);
    for (int r = 0; r < s; ++r) {
      fresh[r] = g.add_vertex();
      for (int u : target) g.add_edge(u, fresh[r]);
    }
    if (tree.black[v] == 0) continue;
    Frame f;
    for (int o = t_ - 1; o >= 0; --o)
      for (int r = 0; r < s; ++r) {
        std::vector<int> c;
        for (int i = 0; i < t_; ++i)
          if (i != o) c.push_back(target[i]);
        c.push_back(fresh[r]);
        f.targets.push_back(std::move(c));
      }
    frames.push_back(std::move(f));
  }
}

LocalGraph CountingSampler::component(int j, const Exponent& e, Rng& rng) const {
  if (j == t_) {
    LocalGraph c(t_);
    const int v = c.add_vertex();
    for (int u = 0; u < t_; ++u) c.add_edge(u, v);
    return c;
  }
  // A (j+1)-connected graph on N vertices, drawn rooted at a (j+1)-clique
  // and re-rooted at a uniform ordered j-clique.
  const int N = e[0] + j;
  LocalGraph U(j + 1);
  std::vector<int> top(j + 1);
  std::iota(top.begin(), top.end(), 0);
  if (j + 1 == t_) {
    attach_ktree(U, top, N - t_, rng);
  } else {
    auto L = level(j);
    auto L1 = level(j + 1);
    Exponent fixed(L1->vars.size(), 0);
    int free = -1;
    for (std::size_t i = 0; i < L1->vars.size(); ++i) {
      const int x = L1->vars[i];
      auto at = std::find(L->vars.begin(), L->vars.end(), x);
      if (x == 1)
        fixed[i] = N - (j + 1);
      else if (at != L->vars.end())
        fixed[i] = e[at - L->vars.begin()] + static_cast<int>(binom(j, x).get_si()) -
                   static_cast<int>(binom(j + 1, x).get_si());
      else
        free = static_cast<int>(i);
    }
    std::vector<const Exponent*> qs;
    std::vector<mpz_class> weights;
    mpz_class lcm = 1;
    for (const auto& [q, gq] : L1->rooted) {
      bool match = true;
      for (std::size_t i = 0; i < q.size() && match; ++i)
        match = static_cast<int>(i) == free || q[i] == fixed[i];
      if (!match) continue;
      qs.push_back(&q);
      weights.push_back(gq);
      if (free >= 0) lcm = mpz_class(lcm * (q[free] + 1) / gcd(lcm, mpz_class(q[free] + 1)));
    }
    if (qs.empty()) throw ConsistencyError("no rooted graph for the component");
    std::vector<mpz_class> cumulative;
    mpz_class total = 0;
    for (std::size_t i = 0; i < qs.size(); ++i) {
      total += free >= 0 ? mpz_class(weights[i] * lcm / ((*qs[i])[free] + 1)) : weights[i];
      cumulative.push_back(total);
    }
    attach_rooted(U, top, j + 1, *qs[pick_exact(cumulative, rng)], rng, true);
  }

  const ChordalGraph G = as_graph(U);
  const auto all = cliques(G, j);
  std::vector<int> root = all[rng.below(all.size())];
  rng.shuffle(root.begin(), root.end());
  std::vector<int> id(U.n, -1);
  for (int i = 0; i < j; ++i) id[root[i]] = i;
  int next = j;
  for (int v = 0; v < U.n; ++v)
    if (id[v] < 0) id[v] = next++;
  LocalGraph c(j);
  c.n = U.n;
  for (auto [u, v] : G.edges())
    if (id[u] >= j || id[v] >= j) c.add_edge(id[u], id[v]);
  if (c.n - j != e[0]) throw ConsistencyError("component vertex count");
  return c;
}

LocalGraph CountingSampler::component_of_size(int a, int b, Rng& rng) const {
  const auto vars = chain_->level_variables(k_);
  if (vars.size() == 1) return component(k_, {b}, rng);
  if (vars.size() == 2) return component(k_, {b, a}, rng);
  auto L = level(k_);
  std::vector<const Exponent*> es;
  std::vector<mpz_class> cumulative;
  mpz_class total = 0;
  for (const auto& [e, h] : L->comps)
    if (e[0] == b && e[L->marked] == a) {
      total += h;
      es.push_back(&e);
      cumulative.push_back(total);
    }
  if (es.empty()) throw ConsistencyError("no component of this size");
  return component(k_, *es[pick_exact(cumulative, rng)], rng);
}

std::shared_ptr<const CountingSampler::ExactSplit> CountingSampler::exact_split(int a,
                                                                                int b) const {
  std::lock_guard lock(mutex_);
  if (auto it = exact_splits_.find({a, b}); it != exact_splits_.end()) return it->second;
  auto s = std::make_shared<ExactSplit>();
  mpz_class total = 0;
  for (const auto& [key, c] : exact_comps_) {
    const auto [a1, b1] = key;
    if (a1 > a || b1 > b || b1 == 0) continue;
    auto it = exact_sets_->find({a - a1, b - b1});
    if (it == exact_sets_->end()) continue;
    total += binom(b - 1, b1 - 1) * c * it->second;
    s->choices.push_back({a1, b1});
    s->cumulative.push_back(total);
  }
  auto it = exact_sets_->find({a, b});
  if (total != (it == exact_sets_->end() ? mpz_class(0) : it->second))
    throw ConsistencyError("decoration split does not add up");
  exact_splits_[{a, b}] = s;
  return s;
}

void CountingSampler::extend_float_sets(int b) const {
  // b D_b = sum_i i c_i * D_{b-i}, convolving in the clique count.
  while (static_cast<int>(float_sets_.size()) <= b) {
    const int B = static_cast<int>(float_sets_.size());
    std::map<int, long double> next;
    for (int i = 1; i <= B && i < static_cast<int>(float_comps_.size()); ++i)
      for (const auto& [a1, c] : float_comps_[i])
        for (const auto& [a2, d] : float_sets_[B - i]) next[a1 + a2] += i * c * d;
    for (auto& [a, v] : next) v /= B;
    float_sets_.push_back(std::move(next));
  }
}

std::shared_ptr<const CountingSampler::FloatSplit> CountingSampler::float_split(int a,
                                                                                int b) const {
  std::lock_guard lock(mutex_);
  if (auto it = float_splits_.find({a, b}); it != float_splits_.end()) return it->second;
  if (float_comps_.empty()) throw RangeError("decoration size beyond the exact counts");
  extend_float_sets(b);
  auto s = std::make_shared<FloatSplit>();
  long double total = 0;
  for (int b1 = 1; b1 <= b && b1 < static_cast<int>(float_comps_.size()); ++b1)
    for (const auto& [a1, c] : float_comps_[b1]) {
      if (a1 > a) continue;
      auto it = float_sets_[b - b1].find(a - a1);
      if (it == float_sets_[b - b1].end()) continue;
      total += b1 * c * it->second;
      s->choices.push_back({a1, b1});
      s->cumulative.push_back(total);
    }
  auto it = float_sets_[b].find(a);
  if (it == float_sets_[b].end() || total <= 0) throw DomainError("no decoration with these counts");
  const long double want = b * it->second;
  if (std::abs(total - want) > 1e-9L * want)
    throw ConsistencyError("floating decoration split does not add up");
  float_splits_[{a, b}] = s;
  return s;
}

LocalGraph CountingSampler::decoration(int a, int b, Rng& rng) const {
  if (a < 0 || b < 0) throw DomainError("negative decoration size");
  LocalGraph d(k_);
  std::vector<int> root(k_);
  std::iota(root.begin(), root.end(), 0);
  while (b > 0) {
    Choice c;
    if (b <= chain_->component_order()) {
      auto s = exact_split(a, b);
      if (s->choices.empty()) throw DomainError("no decoration with these counts");
      c = s->choices[pick_exact(s->cumulative, rng)];
    } else {
      auto s = float_split(a, b);
      const long double u = rng.uniform01() * s->cumulative.back();
      c = s->choices[std::min(pick(s->cumulative, u), s->choices.size() - 1)];
    }
    merge(d, component_of_size(c.a, c.b, rng), root);
    a -= c.a;
    b -= c.b;
  }
  if (a != 0) throw DomainError("no decoration with these counts");
  return d;
}

LocalGraph CountingSampler::rooted(int n, Rng& rng) const {
  if (n < 0) throw DomainError("negative size");
  if (n > chain_->order()) throw RangeError("size beyond the chain order");
  auto L = level(k_);
  std::vector<const Exponent*> qs;
  std::vector<mpz_class> cumulative;
  mpz_class total = 0;
  for (const auto& [q, gq] : L->rooted)
    if (q[0] == n) {
      total += gq;
      qs.push_back(&q);
      cumulative.push_back(total);
    }
  if (qs.empty()) throw DomainError("no rooted graph of this size");
  LocalGraph g(k_);
  std::vector<int> root(k_);
  std::iota(root.begin(), root.end(), 0);
  attach_rooted(g, root, k_, *qs[pick_exact(cumulative, rng)], rng, false);
  return g;
}

}  // namespace cgs::chordal::detail
