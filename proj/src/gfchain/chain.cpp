#include "cgs/gfchain/chain.hpp"

#include <algorithm>
#include <set>

#include "cgs/errors.hpp"
#include "cgs/gfchain/implicit_kernel.hpp"

namespace cgs::gfchain {

using series::Exponent;
using series::Rational;

namespace {

mpz_class binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

mpz_class factorial(int n) {
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

std::vector<std::string> names(const std::vector<int>& vars) {
  std::vector<std::string> out;
  for (int v : vars) out.push_back(var_name(v));
  return out;
}

// Antiderivative in x1 that keeps the top coefficient (the bound moves up).
MultiSeries integrate_x1(const MultiSeries& a) {
  const MultiSeries s = series::shift(a, "x1", 1);
  const std::size_t v = s.index_of("x1");
  std::map<Exponent, Rational> terms;
  for (const auto& [e, c] : s.terms()) terms.emplace(e, c / e[v]);
  return MultiSeries(s.variables(), s.bounds(), std::move(terms), s.saturated());
}

// The class at level j from its rooted version: attach the root clique and
// forget the root order.
MultiSeries unroot(const MultiSeries& rooted, int j) {
  MultiSeries g = j == 1 ? integrate_x1(rooted) : series::integrate(rooted, var_name(j));
  for (int i = 1; i < j; ++i)
    if (g.has_variable(var_name(i))) g = series::shift(g, var_name(i), static_cast<int>(binom(j, i).get_si()));
  return Rational(1, factorial(j)) * g;
}

// Components of level j from the class at level j + 1: root it at an ordered
// j-clique and drop the root's sub-cliques.
MultiSeries component_from(const MultiSeries& upper, int j, const std::vector<int>& level_vars,
                           const std::vector<int>& clique_bounds) {
  MultiSeries h = series::differentiate(upper, var_name(j));
  for (int i = 1; i < j; ++i)
    if (h.has_variable(var_name(i))) h = series::shift(h, var_name(i), -static_cast<int>(binom(j, i).get_si()));
  h = Rational(factorial(j)) * h;
  if (h.has_variable(var_name(j + 1)) &&
      std::find(level_vars.begin(), level_vars.end(), j + 1) == level_vars.end())
    h = series::substitute(h, {{var_name(j + 1), Rational(1)}});
  std::vector<int> bounds;
  for (int v : level_vars) {
    const int b = h.bound(var_name(v));
    bounds.push_back(v == 1 ? b : std::min(b, clique_bounds[v]));
  }
  return series::embed(h, names(level_vars), bounds);
}

MultiSeries solve_level(const MultiSeries& h, int j, int order, bool parallel) {
  const auto& vars = h.variables();
  if (vars.empty() || vars[0] != "x1") throw ConsistencyError("level series must start with x1");
  if (h.bound("x1") < order) throw ConsistencyError("component series too short for the order");
  const std::size_t packed = vars.size() - 1;
  const std::size_t marked_index = j == 1 ? 0 : h.index_of(var_name(j));

  ImplicitProblem p;
  p.order = order;
  for (std::size_t i = 1; i < vars.size(); ++i) {
    if (h.bounds()[i] > kMaxPackedExponent) throw ConfigurationError("order too large for packed exponents");
    p.bounds.push_back(h.bounds()[i]);
  }
  for (const auto& [e, c] : h.terms()) {
    if (e[0] > order) continue;
    mpq_class v = c * factorial(e[0]);
    if (v.get_den() != 1) throw ConsistencyError("component series is not integral in labelled form");
    p.terms.push_back({e[0], pack(std::vector<int>(e.begin() + 1, e.end())), e[marked_index], v.get_num()});
  }
  const ImplicitSolution sol = parallel ? solve_implicit_parallel(p) : solve_implicit_serial(p);

  std::map<Exponent, Rational> terms;
  for (int n = 0; n <= order; ++n) {
    const mpz_class f = factorial(n);
    for (const auto& [key, val] : sol.labelled[n]) {
      Exponent e{n};
      const auto rest = unpack(key, packed);
      e.insert(e.end(), rest.begin(), rest.end());
      terms.emplace(std::move(e), Rational(val, f));
    }
  }
  std::vector<int> bounds = h.bounds();
  bounds[0] = order;
  std::vector<bool> sat(vars.size(), false);
  sat[0] = !h.is_zero();
  for (std::size_t i = 0; i < packed; ++i) sat[i + 1] = sol.saturated[i] || h.saturated()[i + 1];
  return MultiSeries(vars, bounds, std::move(terms), std::move(sat));
}

}  // namespace

const MultiSeries& GFChain::rooted(int j) const {
  auto it = rooted_.find(j);
  if (it == rooted_.end()) throw RangeError("no rooted series at level " + std::to_string(j));
  return it->second;
}

const MultiSeries& GFChain::component(int j) const {
  auto it = component_.find(j);
  if (it == component_.end()) throw RangeError("no component series at level " + std::to_string(j));
  return it->second;
}

const MultiSeries& GFChain::unrooted(int j) const {
  auto it = unrooted_.find(j);
  if (it == unrooted_.end()) throw RangeError("no unrooted series at level " + std::to_string(j));
  return it->second;
}

std::vector<int> GFChain::level_variables(int j) const {
  std::set<int> v{1, k_};
  if (all_)
    for (int i = 1; i <= t_; ++i) v.insert(i);
  for (int i = k_; i <= j; ++i) v.insert(i);
  return {v.begin(), v.end()};
}

int GFChain::clique_bound(int i) const { return clique_bounds_.at(i); }

int GFChain::exact_range() const { return k_ == 1 ? std::max(order_, component_order_) : order_; }

GFChain build_chain(int t, int k, int order, const ChainOptions& options) {
  if (t < 1 || k < 1 || k > t) throw ConfigurationError("need 1 <= k <= t");
  if (order < 0) throw ConfigurationError("order must be nonnegative");
  GFChain c;
  c.t_ = t;
  c.k_ = k;
  c.order_ = order;
  c.component_order_ = std::max(order, options.component_order);
  c.all_ = options.track_all_cliques;
  const int top = c.component_order_;

  c.clique_bounds_.assign(t + 2, 0);
  for (int i = 2; i <= t + 1; ++i) {
    const mpz_class b = binom(t, i - 1) * (top + t + 2) + binom(t + 1, i);
    if (b > kMaxPackedExponent) throw ConfigurationError("order too large for packed exponents");
    c.clique_bounds_[i] = static_cast<int>(b.get_si());
  }

  // The (t+1)-clique.
  const auto top_vars = c.level_variables(t);
  std::vector<int> top_bounds;
  Exponent e;
  for (int v : top_vars) {
    top_bounds.push_back(v == 1 ? top + t + 1 : c.clique_bounds_[v]);
    e.push_back(static_cast<int>(binom(t + 1, v).get_si()));
  }
  c.unrooted_[t + 1] =
      MultiSeries::monomial(names(top_vars), top_bounds, e, Rational(1, factorial(t + 1)));

  for (int j = t; j >= k; --j) {
    const auto vars = c.level_variables(j);
    c.component_[j] = component_from(c.unrooted_[j + 1], j, vars, c.clique_bounds_);
    c.rooted_[j] = solve_level(c.component_[j], j, j == k ? order : top, options.parallel);
    c.unrooted_[j] = unroot(c.rooted_[j], j);
  }
  return c;
}

std::vector<mpz_class> labelled_counts(const MultiSeries& s) {
  const std::size_t x1 = s.index_of("x1");
  for (std::size_t i = 0; i < s.arity(); ++i)
    if (i != x1 && s.saturated()[i])
      throw DomainError("series is saturated in " + s.variables()[i] + "; cannot set it to 1");
  const int n_max = s.bounds()[x1];
  std::vector<mpq_class> sums(n_max + 1);
  for (const auto& [e, c] : s.terms()) sums[e[x1]] += c;
  std::vector<mpz_class> out(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    mpq_class v = sums[n] * factorial(n);
    if (v.get_den() != 1) throw ConsistencyError("labelled count is not an integer");
    out[n] = v.get_num();
  }
  return out;
}

mpz_class count(const GFChain& chain, int n, bool rooted) {
  if (n < 0) throw RangeError("negative size");
  const int k = chain.k();
  if (rooted) {
    if (n <= chain.order()) return labelled_counts(chain.rooted(k))[n];
    if (k == 1 && n <= chain.component_order()) return rooted_count_lagrange(chain, n);
    throw RangeError("size beyond the chain order");
  }
  const MultiSeries& g = chain.unrooted(k);
  if (n <= g.bound("x1")) return labelled_counts(g)[n];
  // For k = 1 an unrooted graph on n vertices is a rooted one on n - 1.
  if (k == 1 && n - 1 <= chain.component_order()) return rooted_count_lagrange(chain, n - 1);
  throw RangeError("size beyond the chain order");
}

std::shared_ptr<const std::map<std::pair<int, int>, mpz_class>> decoration_table(
    const GFChain& chain, int max_a, int max_b) {
  if (max_a < 0 || max_b < 0) throw RangeError("negative decoration size");
  auto& cache = *chain.decorations_;
  std::lock_guard lock(cache.mutex);
  if (cache.table && cache.max_a >= max_a && cache.max_b >= max_b) return cache.table;
  max_a = std::max(max_a, cache.max_a);
  max_b = std::max(max_b, cache.max_b);

  const int k = chain.k();
  const MultiSeries& h = chain.component(k);
  if (h.bound("x1") < max_b) throw RangeError("decoration size beyond the component order");
  auto table = std::make_shared<std::map<std::pair<int, int>, mpz_class>>();
  if (k == 1) {
    // Only a == b occurs.
    const int n_max = std::min(max_a, max_b);
    MultiSeries spec = h;
    for (const auto& v : h.variables())
      if (v != "x1") spec = series::substitute(spec, {{v, Rational(1)}});
    spec = series::truncate(spec, "x1", n_max);
    const auto counts = labelled_counts(series::exp(spec));
    for (int n = 0; n <= n_max; ++n)
      if (sgn(counts[n]) != 0) (*table)[{n, n}] = counts[n];
  } else {
    MultiSeries spec = h;
    for (const auto& v : h.variables())
      if (v != "x1" && v != var_name(k)) spec = series::substitute(spec, {{v, Rational(1)}});
    spec = series::embed(spec, {"x1", var_name(k)}, {max_b, max_a});
    const MultiSeries ex = series::exp(spec);
    for (const auto& [e, c] : ex.terms()) {
      mpq_class v = c * factorial(e[0]);
      if (v.get_den() != 1) throw ConsistencyError("decoration count is not an integer");
      (*table)[{e[1], e[0]}] = v.get_num();
    }
  }
  cache.max_a = max_a;
  cache.max_b = max_b;
  cache.table = table;
  return table;
}

mpz_class decoration_count(const GFChain& chain, int a, int b) {
  if (a < 0 || b < 0) return 0;
  auto table = decoration_table(chain, a, b);
  auto it = table->find({a, b});
  return it == table->end() ? mpz_class(0) : it->second;
}

}  // namespace cgs::gfchain
