#include "cgs/gfchain/float_chain.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "cgs/errors.hpp"
#include "cgs/gfchain/implicit_kernel.hpp"

namespace cgs::gfchain {

namespace {

using Real = long double;
using Exponent = std::vector<int>;

// Series over clique sizes `vars` (vars[0] == 1), x1 already rescaled.
struct FSeries {
  std::vector<int> vars;
  std::map<Exponent, Real> terms;

  std::ptrdiff_t at(int clique) const {
    auto it = std::find(vars.begin(), vars.end(), clique);
    return it == vars.end() ? -1 : it - vars.begin();
  }
};

Real factorial(int n) {
  Real r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

long long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Multiply by x_i^delta (delta may be negative).
FSeries shift(const FSeries& s, int clique, int delta, Real scale) {
  const auto v = s.at(clique);
  if (v < 0) return s;
  FSeries out{s.vars, {}};
  const Real f = clique == 1 ? std::pow(scale, static_cast<Real>(delta)) : 1;
  for (const auto& [e, c] : s.terms) {
    Exponent g = e;
    g[v] += delta;
    if (g[v] < 0) throw ConsistencyError("float chain: negative exponent after shift");
    out.terms[g] += c * f;
  }
  return out;
}

FSeries scaled(FSeries s, Real f) {
  for (auto& [e, c] : s.terms) c *= f;
  return s;
}

// Slices keyed by packed exponents of vars[1..].
using FSlice = std::vector<std::pair<std::uint64_t, Real>>;

class FAcc {
 public:
  explicit FAcc(const std::vector<int>& bounds) : bounds_(bounds) {}

  void add(std::uint64_t key, Real v) {
    if (!spilled_) {
      if (!has_single_) {
        single_key_ = key;
        single_ = v;
        has_single_ = true;
        return;
      }
      if (key == single_key_) {
        single_ += v;
        return;
      }
      spilled_ = true;
      map_[single_key_] += single_;
    }
    map_[key] += v;
  }

  bool fits(std::uint64_t a, std::uint64_t b) const {
    for (std::size_t i = 0; i < bounds_.size(); ++i)
      if (static_cast<int>(((a >> (16 * i)) & 0xffff) + ((b >> (16 * i)) & 0xffff)) > bounds_[i]) return false;
    return true;
  }

  void addmul(const FSlice& a, const FSlice& b, Real scale) {
    for (const auto& [ka, va] : a)
      for (const auto& [kb, vb] : b)
        if (fits(ka, kb)) add(ka + kb, va * vb * scale);
  }

  FSlice take() {
    FSlice out;
    if (!spilled_) {
      if (has_single_ && single_ != 0) out.emplace_back(single_key_, single_);
    } else {
      for (const auto& [k, v] : map_)
        if (v != 0) out.emplace_back(k, v);
      std::sort(out.begin(), out.end());
    }
    return out;
  }

 private:
  const std::vector<int>& bounds_;
  bool has_single_ = false, spilled_ = false;
  std::uint64_t single_key_ = 0;
  Real single_ = 0;
  std::unordered_map<std::uint64_t, Real> map_;
};

// Y = exp(H(x1, ..., x_j Y, ...)) in ordinary (rescaled) coefficients.
FSeries solve(const FSeries& h, int j, int order, const std::vector<int>& bounds) {
  const std::size_t packed = h.vars.size() - 1;
  const auto marked_at = j == 1 ? 0 : h.at(j);
  struct Term {
    int grade;
    std::uint64_t key;
    int marked;
    Real value;
  };
  std::vector<Term> terms;
  int max_marked = 0;
  for (const auto& [e, c] : h.terms) {
    if (e[0] > order || c == 0) continue;
    if (e[0] < 1) throw ConsistencyError("float chain: component term of grade 0");
    terms.push_back({e[0], pack(Exponent(e.begin() + 1, e.end())), e[marked_at], c});
    max_marked = std::max(max_marked, e[marked_at]);
  }
  // limit[m]: highest grade of the m-th power that is ever read.
  std::vector<int> limit(max_marked + 1, -1);
  {
    std::vector<int> dmin(max_marked + 1, order + 1);
    for (const auto& t : terms) dmin[t.marked] = std::min(dmin[t.marked], t.grade);
    int run = -1;
    for (int m = max_marked; m >= 0; --m) {
      run = std::max(run, order - dmin[m]);
      limit[m] = run;
    }
  }
  const FSlice one{{0, 1}};
  std::vector<FSlice> y(order + 1), s(order + 1);
  y[0] = one;
  std::vector<std::vector<FSlice>> pw(max_marked + 1);
  for (int m = 0; m <= max_marked; ++m) {
    pw[m].resize(std::max(limit[m], 0) + 1);
    pw[m][0] = one;
  }
  for (int n = 1; n <= order; ++n) {
    {
      FAcc acc(bounds);
      for (const auto& t : terms) {
        if (t.grade > n) continue;
        for (const auto& [k, v] : pw[t.marked][n - t.grade])
          if (acc.fits(k, t.key)) acc.add(k + t.key, v * t.value);
      }
      s[n] = acc.take();
    }
    {
      FAcc acc(bounds);
      for (int i = 1; i <= n; ++i) acc.addmul(s[i], y[n - i], static_cast<Real>(i) / n);
      y[n] = acc.take();
    }
    for (int m = 1; m <= max_marked && limit[m] >= n; ++m) {
      FAcc acc(bounds);
      for (int i = 0; i <= n; ++i) acc.addmul(y[i], pw[m - 1][n - i], 1);
      pw[m][n] = acc.take();
    }
  }
  FSeries out{h.vars, {}};
  for (int n = 0; n <= order; ++n)
    for (const auto& [k, v] : y[n]) {
      Exponent e{n};
      const auto rest = unpack(k, packed);
      e.insert(e.end(), rest.begin(), rest.end());
      out.terms[e] = v;
    }
  return out;
}

FSeries unroot(const FSeries& y, int j, Real scale) {
  // j >= 2 here: the last level is never unrooted in the float chain.
  const auto v = y.at(j);
  FSeries g{y.vars, {}};
  for (const auto& [e, c] : y.terms) {
    Exponent f = e;
    f[v] += 1;
    g.terms[f] += c / f[v];
  }
  for (int i = 1; i < j; ++i) g = shift(g, i, static_cast<int>(binom(j, i)), scale);
  return scaled(g, 1 / factorial(j));
}

FSeries component_from(const FSeries& upper, int j, const std::vector<int>& level_vars, Real scale,
                       int order) {
  const auto v = upper.at(j);
  FSeries h{upper.vars, {}};
  for (const auto& [e, c] : upper.terms) {
    if (e[v] == 0) continue;
    Exponent f = e;
    f[v] -= 1;
    h.terms[f] += c * e[v] / (j == 1 ? scale : Real(1));
  }
  for (int i = 1; i < j; ++i) h = shift(h, i, -static_cast<int>(binom(j, i)), scale);
  h = scaled(h, factorial(j));
  // Restrict to the level variables, setting the others to 1.
  FSeries out{level_vars, {}};
  for (const auto& [e, c] : h.terms) {
    if (e[0] > order) continue;
    Exponent f;
    for (int lv : level_vars) f.push_back(e[h.at(lv)]);
    out.terms[f] += c;
  }
  return out;
}

}  // namespace

FloatComponent float_component(const GFChain& shape, int order, long double scale) {
  if (order < 1) throw ConfigurationError("float chain order must be positive");
  if (!(scale > 0)) throw ConfigurationError("float chain scale must be positive");
  const int t = shape.t(), k = shape.k();

  std::vector<int> bounds_by_clique(t + 2, 0);
  for (int i = 2; i <= t + 1; ++i) {
    const long long b = binom(t, i - 1) * (order + t + 2) + binom(t + 1, i);
    if (b > kMaxPackedExponent) throw ConfigurationError("float chain order too large for packed exponents");
    bounds_by_clique[i] = static_cast<int>(b);
  }

  FSeries g{shape.level_variables(t), {}};
  {
    Exponent e;
    for (int v : g.vars) e.push_back(static_cast<int>(binom(t + 1, v)));
    g.terms[e] = std::pow(static_cast<Real>(scale), static_cast<Real>(t + 1)) / factorial(t + 1);
  }
  FSeries h;
  for (int j = t; j >= k; --j) {
    const auto vars = shape.level_variables(j);
    h = component_from(g, j, vars, scale, order);
    if (j == k) break;
    std::vector<int> bounds;
    for (std::size_t i = 1; i < vars.size(); ++i) bounds.push_back(bounds_by_clique[vars[i]]);
    g = unroot(solve(h, j, order, bounds), j, scale);
  }

  FloatComponent out;
  out.order = order;
  out.scale = scale;
  out.exact = t == k;
  const auto xk = h.at(k);
  for (const auto& [e, c] : h.terms) {
    if (c == 0) continue;
    out.terms[{e[0], e[xk]}] += c;
  }
  return out;
}

int max_float_order(int t) {
  long long best = 0;
  for (int i = 2; i <= t + 1; ++i) {
    // C(t, i-1) (N + t + 2) + C(t+1, i) <= limit
    const long long n = (kMaxPackedExponent - binom(t + 1, i)) / binom(t, i - 1) - t - 2;
    best = i == 2 ? n : std::min(best, n);
  }
  return static_cast<int>(std::max(best, 0LL));
}

FloatComponent float_component_exact(const GFChain& chain, long double scale) {
  const auto& h = chain.component(chain.k());
  const std::size_t x1 = h.index_of("x1");
  const std::size_t xk = h.index_of(var_name(chain.k()));
  std::map<std::pair<int, int>, mpq_class> sums;
  for (const auto& [e, c] : h.terms()) sums[{e[x1], e[xk]}] += c;
  FloatComponent out;
  out.order = h.bound("x1");
  out.scale = scale;
  out.exact = !h.any_saturated();
  const Real ls = std::log2(static_cast<Real>(scale));
  for (const auto& [key, c] : sums) {
    if (sgn(c) == 0) continue;
    long en = 0, ed = 0;
    const double mn = mpz_get_d_2exp(&en, c.get_num_mpz_t());
    const double md = mpz_get_d_2exp(&ed, c.get_den_mpz_t());
    const Real l2 = std::log2(static_cast<Real>(mn) / md) + static_cast<Real>(en - ed) + key.first * ls;
    out.terms[key] = std::exp2(l2);
  }
  return out;
}

}  // namespace cgs::gfchain
