#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "cgs/analytic/analytic.hpp"
#include "cgs/errors.hpp"
#include "tail_fit.hpp"

namespace cgs::analytic {

namespace {

using Real = long double;
using Entry = OffspringLaw::Entry;

// Largest cutoff the floating re-run supports.
constexpr int kMaxCutoff = 32000;
constexpr int kFirstCutoff = 64;

double log2_z(const mpz_class& z) {
  long e = 0;
  const double m = mpz_get_d_2exp(&e, z.get_mpz_t());
  return std::log2(m) + static_cast<double>(e);
}

double log2_factorial(int n) { return std::lgamma(n + 1.0) / std::log(2.0); }

// Entries below this are dropped while building the table; the loss shows
// up in the deficit.
constexpr Real kPrune = 1e-40L;

// Coefficients of H(rho w, y z): the Poisson intensities of the pieces.
std::vector<OffspringLaw::Piece> pieces_at(const gfchain::FloatComponent& f, double rho, double y) {
  const Real lr = std::log(rho / f.scale), ly = std::log(static_cast<Real>(y));
  std::vector<OffspringLaw::Piece> out;
  for (const auto& [key, c] : f.terms) {
    const auto [b, a] = key;
    if (b < 1 || b > f.order || !(c > 0)) continue;
    const double w = static_cast<double>(c * std::exp(b * lr + a * ly));
    if (w > 0) out.push_back({a, b, w});
  }
  return out;
}

// [w^b z^a] exp(H(rho w, y z)) / y for a, b <= cap, unsorted. White counts
// beyond the component order are left out.
std::vector<Entry> pgf_table(const gfchain::FloatComponent& f, double rho, double y, int cap) {
  const Real lr = std::log(rho / f.scale), ly = std::log(static_cast<Real>(y));
  const int top = f.exact ? cap : std::min(cap, f.order);
  std::vector<std::vector<std::pair<int, Real>>> h(top + 1);
  for (const auto& [key, c] : f.terms) {
    const auto [b, a] = key;
    if (b < 1 || b > top || a > cap || !(c > 0)) continue;
    h[b].emplace_back(a, c * std::exp(b * lr + a * ly));
  }
  // exp by E' = H' E in the w-grading: b E_b = sum_i i H_i E_{b-i}.
  std::vector<std::vector<std::pair<int, Real>>> e(top + 1);
  e[0] = {{0, 1}};
  std::vector<Real> acc(cap + 1, 0);
  std::vector<char> seen(cap + 1, 0);
  std::vector<int> used;
  for (int b = 1; b <= top; ++b) {
    used.clear();
    for (int i = 1; i <= b; ++i) {
      if (h[i].empty() || e[b - i].empty()) continue;
      for (const auto& [a1, hv] : h[i])
        for (const auto& [a2, ev] : e[b - i]) {
          const int a = a1 + a2;
          if (a > cap) break;
          if (!seen[a]) {
            seen[a] = 1;
            used.push_back(a);
          }
          acc[a] += i * hv * ev;
        }
    }
    std::sort(used.begin(), used.end());
    for (int a : used) {
      if (acc[a] / b > kPrune) e[b].emplace_back(a, acc[a] / b);
      acc[a] = 0;
      seen[a] = 0;
    }
  }
  std::vector<Entry> out;
  for (int b = 0; b <= top; ++b)
    for (const auto& [a, v] : e[b]) {
      const double p = static_cast<double>(v / y);
      if (p > 0) out.push_back({a, b, p});
    }
  return out;
}

OffspringLaw make_law(std::vector<Entry> entries, int cutoff) {
  OffspringLaw law;
  law.cutoff = cutoff;
  std::erase_if(entries, [&](const Entry& e) { return e.black > cutoff || e.white > cutoff; });
  std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    return std::pair(x.black, x.white) < std::pair(y.black, y.white);
  });
  law.entries = std::move(entries);
  law.deficit = 1 - law.total();
  return law;
}

// Smallest c <= cap with 1 - mass([0, c]^2) < eps, or -1.
int smallest_cutoff(const std::vector<Entry>& entries, int cap, double eps) {
  std::vector<Real> level(cap + 1, 0);
  for (const auto& e : entries) level[std::max(e.black, e.white)] += e.p;
  Real mass = 0;
  for (int c = 0; c <= cap; ++c) {
    mass += level[c];
    if (1 - mass < eps) return c;
  }
  return -1;
}

OffspringLaw reweighted(const OffspringLaw& law, bool by_black) {
  OffspringLaw out = law;
  out.pieces.clear();
  const double z = by_black ? 1.0 : law.mean_white();
  if (!(z > 0)) throw DomainError("biased law has no mass");
  for (auto& e : out.entries) e.p = (by_black ? e.black : e.white) * e.p / z;
  std::erase_if(out.entries, [](const Entry& e) { return e.p <= 0; });
  out.deficit = 1 - out.total();
  return out;
}

template <class F>
Real moment(const OffspringLaw& law, F f) {
  Real s = 0;
  for (const auto& e : law.entries) s += f(e) * static_cast<Real>(e.p);
  return s;
}

// Estimated contribution of the untabulated levels to sum f(a, b) p(a, b).
template <class F>
double moment_tail(const OffspringLaw& law, F f, int power) {
  std::vector<Real> level(law.cutoff + 1, 0);
  for (const auto& e : law.entries) level[std::max(e.black, e.white)] += f(e) * static_cast<Real>(e.p);
  std::vector<std::pair<int, Real>> blocks;
  for (int m = 1; m <= law.cutoff; ++m)
    if (level[m] > 0) blocks.emplace_back(m, std::log(level[m]));
  const Real fit = detail::fitted_tail(blocks);
  const double crude = std::max(law.deficit, 0.0) * std::pow(law.cutoff + 1.0, power);
  return std::isfinite(static_cast<double>(fit)) ? static_cast<double>(2 * fit) + std::max(law.deficit, 0.0)
                                                 : crude;
}

}  // namespace

double OffspringLaw::operator()(int a, int b) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), std::pair(a, b),
                             [](const Entry& e, const std::pair<int, int>& k) {
                               return std::pair(e.black, e.white) < k;
                             });
  return it != entries.end() && it->black == a && it->white == b ? it->p : 0.0;
}

double OffspringLaw::total() const {
  return static_cast<double>(moment(*this, [](const Entry&) { return Real(1); }));
}
double OffspringLaw::mean_black() const {
  return static_cast<double>(moment(*this, [](const Entry& e) { return Real(e.black); }));
}
double OffspringLaw::mean_white() const {
  return static_cast<double>(moment(*this, [](const Entry& e) { return Real(e.white); }));
}
double OffspringLaw::var_black() const {
  const Real m = moment(*this, [](const Entry& e) { return Real(e.black); });
  return static_cast<double>(moment(*this, [](const Entry& e) { return Real(e.black) * e.black; }) - m * m);
}
double OffspringLaw::var_white() const {
  const Real m = moment(*this, [](const Entry& e) { return Real(e.white); });
  return static_cast<double>(moment(*this, [](const Entry& e) { return Real(e.white) * e.white; }) - m * m);
}

OffspringLaw offspring_law(const GFChain& chain, const Singularity& s, std::optional<int> cutoff, double eps) {
  if (!(eps > 0)) throw ConfigurationError("deficit tolerance must be positive");
  if (cutoff && *cutoff < 0) throw ConfigurationError("negative cutoff");
  if (cutoff && *cutoff > kMaxCutoff) throw ConfigurationError("cutoff above the supported maximum");
  if (!(s.rho > 0) || !(s.y > 0)) throw ConfigurationError("singularity not computed");
  std::shared_ptr<const gfchain::FloatComponent> comp = s.component;
  if (!comp) comp = std::make_shared<gfchain::FloatComponent>(gfchain::float_component_exact(chain, 1.0L));

  const int max_order = std::min(kMaxCutoff, gfchain::max_float_order(chain.t()));
  int cap = cutoff ? *cutoff : kFirstCutoff;
  for (;;) {
    const auto entries = pgf_table(*comp, s.rho, s.y, cap);
    if (cutoff) {
      OffspringLaw law = make_law(entries, cap);
      if (law.deficit <= eps) {
        law.pieces = pieces_at(*comp, s.rho, s.y);
        return law;
      }
    } else {
      const int best = smallest_cutoff(entries, cap, eps);
      if (best >= 0) {
        OffspringLaw law = make_law(entries, best);
        law.pieces = pieces_at(*comp, s.rho, s.y);
        return law;
      }
    }
    // Grow the table first, then the component.
    if (!cutoff && cap < kMaxCutoff) {
      cap = std::min(4 * cap, kMaxCutoff);
      continue;
    }
    if (comp->exact || comp->order >= std::min(max_order, cap))
      throw RangeError("offspring deficit above tolerance; use a larger cutoff or tolerance");
    const int next = std::min(max_order, std::max({2 * comp->order, 4096, cap}));
    const long double scale = chain.k() == 1 ? s.rho * s.y : s.rho;
    comp = std::make_shared<gfchain::FloatComponent>(gfchain::float_component(chain, next, scale));
  }
}

OffspringLaw biased_by_black(const OffspringLaw& law) { return reweighted(law, true); }
OffspringLaw biased_by_white(const OffspringLaw& law) { return reweighted(law, false); }

double size_probability(const GFChain& chain, const Singularity& s, int n) {
  if (n < 0) throw RangeError("negative size");
  if (n > chain.exact_range()) throw RangeError("size beyond the exact range of the chain");
  const mpz_class c = gfchain::count(chain, n, true);
  if (sgn(c) == 0) return 0;
  return std::exp2(log2_z(c) - log2_factorial(n) + n * std::log2(s.rho) - std::log2(s.y));
}

namespace {

struct PieceMoments {
  Real mean_black = 0, mean_white = 0, var_black = 0, var_white = 0;
};

// A compound Poisson sum has mean sum(w v) and variance sum(w v^2).
PieceMoments piece_moments(const std::vector<OffspringLaw::Piece>& pieces) {
  PieceMoments m;
  for (const auto& p : pieces) {
    const Real w = p.weight, a = p.black, b = p.white;
    m.mean_black += w * a;
    m.mean_white += w * b;
    m.var_black += w * a * a;
    m.var_white += w * b * b;
  }
  return m;
}

// Fitted continuation of sum over pieces of f(piece) * weight, by white count.
template <class F>
double piece_tail(const std::vector<OffspringLaw::Piece>& pieces, F f) {
  std::map<int, Real> by_white;
  for (const auto& p : pieces) by_white[p.white] += f(p) * static_cast<Real>(p.weight);
  std::vector<std::pair<int, Real>> blocks;
  for (const auto& [b, v] : by_white)
    if (v > 0) blocks.emplace_back(b, std::log(v));
  const Real t = detail::fitted_tail(blocks);
  return static_cast<double>(2 * t);
}

}  // namespace

TreeConstants tree_constants(const GFChain& chain, const Singularity& s, const OffspringLaw& law) {
  TreeConstants tc;
  tc.rho = s.rho;
  tc.y = s.y;
  tc.rho_err = s.rho_err;
  tc.y_err = s.y_err;
  const bool exact_component = s.component && s.component->exact;
  if (!law.pieces.empty()) {
    const auto m = piece_moments(law.pieces);
    tc.mean_black = static_cast<double>(m.mean_black);
    tc.mean_white = static_cast<double>(m.mean_white);
    tc.var_black = static_cast<double>(m.var_black);
    tc.var_white = static_cast<double>(m.var_white);
    if (!exact_component) {
      using P = OffspringLaw::Piece;
      tc.mean_black_err = piece_tail(law.pieces, [](const P& p) { return Real(p.black); });
      tc.mean_white_err = piece_tail(law.pieces, [](const P& p) { return Real(p.white); });
      tc.var_black_err = piece_tail(law.pieces, [](const P& p) { return Real(p.black) * p.black; });
    }
  } else {
    tc.mean_black = law.mean_black();
    tc.mean_white = law.mean_white();
    tc.var_black = law.var_black();
    tc.var_white = law.var_white();
    const double t1 = moment_tail(law, [](const Entry& e) { return Real(e.black); }, 1);
    tc.mean_black_err = t1;
    tc.mean_white_err = moment_tail(law, [](const Entry& e) { return Real(e.white); }, 1);
    tc.var_black_err = moment_tail(law, [](const Entry& e) { return Real(e.black) * e.black; }, 2) +
                       2 * tc.mean_black * t1;
  }
  tc.kappa_tree = std::sqrt(tc.var_black * tc.mean_white) / 2;

  // Moving (rho, y) by their error bounds.
  double dk = 0;
  if (s.component && (s.rho_err > 0 || s.y_err > 0)) {
    const double rho_m = std::max(s.rho - s.rho_err, 1e-300), y_m = std::max(s.y - s.y_err, 1e-300);
    const auto m = piece_moments(pieces_at(*s.component, rho_m, y_m));
    tc.mean_black_err += std::fabs(static_cast<double>(m.mean_black) - tc.mean_black);
    tc.mean_white_err += std::fabs(static_cast<double>(m.mean_white) - tc.mean_white);
    tc.var_black_err += std::fabs(static_cast<double>(m.var_black) - tc.var_black);
    dk = std::fabs(std::sqrt(static_cast<double>(m.var_black * m.mean_white)) / 2 - tc.kappa_tree);
  }
  tc.kappa_tree_err =
      dk + (tc.kappa_tree > 0 ? tc.kappa_tree / 2 * (tc.var_black_err / tc.var_black + tc.mean_white_err / tc.mean_white)
                              : 0);

  // Richardson on f(n) = n^{3/2} P(#white = n), assuming f = C (1 + a/n + ...).
  int n = chain.exact_range();
  while (n > 1 && size_probability(chain, s, n) == 0) --n;
  const int m = n / 2;
  if (m >= 1) {
    const double fn = std::pow(n, 1.5) * size_probability(chain, s, n);
    const double fm = std::pow(m, 1.5) * size_probability(chain, s, m);
    const double ratio = static_cast<double>(n) / m;
    tc.size_prob_constant = (ratio * fn - fm) / (ratio - 1);
    tc.size_prob_constant_err = std::fabs(fn - tc.size_prob_constant);
  }
  return tc;
}

}  // namespace cgs::analytic
