#include "cgs/series/multi_series.hpp"

#include <algorithm>
#include <numeric>

#include "cgs/errors.hpp"

namespace cgs::series {

namespace {

bool within(const Exponent& e, const std::vector<int>& bounds) {
  for (std::size_t i = 0; i < e.size(); ++i)
    if (e[i] > bounds[i]) return false;
  return true;
}

void mark_overflow(const Exponent& e, const std::vector<int>& bounds, std::vector<bool>& sat) {
  for (std::size_t i = 0; i < e.size(); ++i)
    if (e[i] > bounds[i]) sat[i] = true;
}

void require_same_variables(const MultiSeries& a, const MultiSeries& b, const char* op) {
  if (a.variables() != b.variables())
    throw ConfigurationError(std::string(op) + ": operands live over different variable lists");
}

std::vector<int> min_bounds(const MultiSeries& a, const MultiSeries& b) {
  std::vector<int> out(a.arity());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::min(a.bounds()[i], b.bounds()[i]);
  return out;
}

std::vector<bool> or_flags(const std::vector<bool>& a, const std::vector<bool>& b) {
  std::vector<bool> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] || b[i];
  return out;
}

int total_degree(const Exponent& e) { return std::accumulate(e.begin(), e.end(), 0); }

}  // namespace

MultiSeries::MultiSeries(std::vector<std::string> variables, std::vector<int> bounds)
    : MultiSeries(std::move(variables), std::move(bounds), {}, {}) {}

MultiSeries::MultiSeries(std::vector<std::string> variables, std::vector<int> bounds,
                         std::map<Exponent, Rational> terms, std::vector<bool> saturated)
    : vars_(std::move(variables)),
      bounds_(std::move(bounds)),
      saturated_(std::move(saturated)),
      terms_(std::move(terms)) {
  if (vars_.size() != bounds_.size())
    throw ConfigurationError("variable list and bound list differ in length");
  for (int b : bounds_)
    if (b < 0) throw ConfigurationError("truncation bounds must be nonnegative");
  for (std::size_t i = 0; i < vars_.size(); ++i)
    for (std::size_t j = i + 1; j < vars_.size(); ++j)
      if (vars_[i] == vars_[j]) throw ConfigurationError("duplicate variable " + vars_[i]);
  if (saturated_.empty()) saturated_.assign(vars_.size(), false);
  if (saturated_.size() != vars_.size())
    throw ConfigurationError("saturation flags differ in length from variable list");
  normalise();
}

void MultiSeries::normalise() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->first.size() != vars_.size())
      throw ConfigurationError("exponent arity does not match variable count");
    for (int x : it->first)
      if (x < 0) throw ConfigurationError("negative exponent");
    if (sgn(it->second) == 0) {
      it = terms_.erase(it);
      continue;
    }
    if (!within(it->first, bounds_)) {
      mark_overflow(it->first, bounds_, saturated_);
      it = terms_.erase(it);
      continue;
    }
    it->second.canonicalize();
    ++it;
  }
}

MultiSeries MultiSeries::constant(std::vector<std::string> variables, std::vector<int> bounds,
                                  const Rational& c) {
  std::map<Exponent, Rational> t;
  t[Exponent(variables.size(), 0)] = c;
  return MultiSeries(std::move(variables), std::move(bounds), std::move(t));
}

MultiSeries MultiSeries::variable(std::vector<std::string> variables, std::vector<int> bounds,
                                  std::string_view name) {
  MultiSeries shape(variables, bounds);
  Exponent e(variables.size(), 0);
  e[shape.index_of(name)] = 1;
  return monomial(std::move(variables), std::move(bounds), e, 1);
}

MultiSeries MultiSeries::monomial(std::vector<std::string> variables, std::vector<int> bounds,
                                  const Exponent& e, const Rational& c) {
  std::map<Exponent, Rational> t;
  t[e] = c;
  return MultiSeries(std::move(variables), std::move(bounds), std::move(t));
}

bool MultiSeries::has_variable(std::string_view name) const {
  return std::find(vars_.begin(), vars_.end(), name) != vars_.end();
}

std::size_t MultiSeries::index_of(std::string_view name) const {
  auto it = std::find(vars_.begin(), vars_.end(), name);
  if (it == vars_.end()) throw ConfigurationError("unknown variable " + std::string(name));
  return static_cast<std::size_t>(it - vars_.begin());
}

bool MultiSeries::any_saturated() const {
  return std::any_of(saturated_.begin(), saturated_.end(), [](bool b) { return b; });
}

Rational MultiSeries::coefficient(const Exponent& e) const {
  if (e.size() != vars_.size()) throw ConfigurationError("exponent arity mismatch");
  for (std::size_t i = 0; i < e.size(); ++i)
    if (e[i] < 0 || e[i] > bounds_[i])
      throw RangeError("exponent of " + vars_[i] + " outside the truncation bound");
  auto it = terms_.find(e);
  return it == terms_.end() ? Rational(0) : it->second;
}

Rational MultiSeries::constant_term() const { return coefficient(Exponent(vars_.size(), 0)); }

int MultiSeries::degree_in(std::string_view name) const {
  const std::size_t i = index_of(name);
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, e[i]);
  return d;
}

bool MultiSeries::same_space(const MultiSeries& other) const {
  return vars_ == other.vars_ && bounds_ == other.bounds_;
}

bool MultiSeries::operator==(const MultiSeries& other) const {
  return same_space(other) && terms_ == other.terms_;
}

MultiSeries add(const MultiSeries& a, const MultiSeries& b) {
  require_same_variables(a, b, "add");
  auto terms = a.terms();
  for (const auto& [e, c] : b.terms()) terms[e] += c;
  return MultiSeries(a.variables(), min_bounds(a, b), std::move(terms),
                     or_flags(a.saturated(), b.saturated()));
}

MultiSeries operator+(const MultiSeries& a, const MultiSeries& b) { return add(a, b); }

MultiSeries operator-(const MultiSeries& a, const MultiSeries& b) {
  return add(a, Rational(-1) * b);
}

MultiSeries operator*(const Rational& c, const MultiSeries& a) {
  auto terms = a.terms();
  for (auto& [e, v] : terms) v *= c;
  return MultiSeries(a.variables(), a.bounds(), std::move(terms), a.saturated());
}

MultiSeries mul(const MultiSeries& a, const MultiSeries& b) {
  require_same_variables(a, b, "mul");
  const auto bounds = min_bounds(a, b);
  auto sat = or_flags(a.saturated(), b.saturated());
  std::map<Exponent, Rational> out;
  Exponent e(a.arity());
  for (const auto& [ea, ca] : a.terms()) {
    for (const auto& [eb, cb] : b.terms()) {
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      if (!within(e, bounds)) {
        mark_overflow(e, bounds, sat);
        continue;
      }
      out[e] += ca * cb;
    }
  }
  return MultiSeries(a.variables(), bounds, std::move(out), std::move(sat));
}

MultiSeries operator*(const MultiSeries& a, const MultiSeries& b) { return mul(a, b); }

MultiSeries exp(const MultiSeries& a) {
  if (sgn(a.constant_term()) != 0)
    throw DomainError("exp of a series with nonzero constant term is not rational");
  const auto& bounds = a.bounds();
  auto sat = a.saturated();
  // Powers of a reach every degree of any variable a depends on, so the
  // truncation always drops something there.
  for (std::size_t v = 0; v < a.arity(); ++v)
    if (a.degree_in(a.variables()[v]) > 0) sat[v] = true;
  const int top = std::accumulate(bounds.begin(), bounds.end(), 0);

  // Homogeneous blocks of the argument, pre-scaled by their degree.
  std::vector<std::vector<std::pair<Exponent, Rational>>> blocks(top + 1);
  std::vector<int> degrees;
  for (const auto& [e, c] : a.terms()) {
    const int g = total_degree(e);
    if (blocks[g].empty()) degrees.push_back(g);
    blocks[g].emplace_back(e, c * g);
  }
  std::sort(degrees.begin(), degrees.end());

  std::vector<std::map<Exponent, Rational>> y(top + 1);
  y[0][Exponent(a.arity(), 0)] = 1;
  Exponent e(a.arity());
  for (int g = 1; g <= top; ++g) {
    auto& yg = y[g];
    for (int h : degrees) {
      if (h > g) break;
      for (const auto& [ey, cy] : y[g - h]) {
        for (const auto& [ea, ca] : blocks[h]) {
          for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + ey[i];
          if (!within(e, bounds)) {
            mark_overflow(e, bounds, sat);
            continue;
          }
          yg[e] += ca * cy;
        }
      }
    }
    for (auto& [ex, c] : yg) c /= g;
  }
  std::map<Exponent, Rational> out;
  for (auto& block : y)
    for (auto& [ex, c] : block) out.emplace(ex, std::move(c));
  return MultiSeries(a.variables(), bounds, std::move(out), std::move(sat));
}

MultiSeries integrate(const MultiSeries& a, std::string_view var) {
  const std::size_t v = a.index_of(var);
  auto sat = a.saturated();
  std::map<Exponent, Rational> out;
  for (const auto& [e, c] : a.terms()) {
    Exponent f = e;
    f[v] += 1;
    if (f[v] > a.bounds()[v]) {
      sat[v] = true;
      continue;
    }
    out.emplace(std::move(f), c / (e[v] + 1));
  }
  return MultiSeries(a.variables(), a.bounds(), std::move(out), std::move(sat));
}

MultiSeries differentiate(const MultiSeries& a, std::string_view var) {
  const std::size_t v = a.index_of(var);
  auto bounds = a.bounds();
  if (a.saturated()[v]) {
    if (bounds[v] == 0)
      throw DomainError("derivative of a series saturated at bound 0 carries no information");
    bounds[v] -= 1;
  }
  std::map<Exponent, Rational> out;
  for (const auto& [e, c] : a.terms()) {
    if (e[v] == 0) continue;
    Exponent f = e;
    f[v] -= 1;
    out.emplace(std::move(f), c * e[v]);
  }
  return MultiSeries(a.variables(), std::move(bounds), std::move(out), a.saturated());
}

MultiSeries shift(const MultiSeries& a, std::string_view var, int delta) {
  const std::size_t v = a.index_of(var);
  auto bounds = a.bounds();
  bounds[v] += delta;
  if (bounds[v] < 0) throw DomainError("shift would make a bound negative");
  std::map<Exponent, Rational> out;
  for (const auto& [e, c] : a.terms()) {
    Exponent f = e;
    f[v] += delta;
    if (f[v] < 0) throw DomainError("shift would produce a negative exponent");
    out.emplace(std::move(f), c);
  }
  return MultiSeries(a.variables(), std::move(bounds), std::move(out), a.saturated());
}

MultiSeries embed(const MultiSeries& a, const std::vector<std::string>& variables,
                  const std::vector<int>& bounds) {
  MultiSeries shape(variables, bounds);
  std::vector<std::ptrdiff_t> where(a.arity(), -1);
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (shape.has_variable(a.variables()[i]))
      where[i] = static_cast<std::ptrdiff_t>(shape.index_of(a.variables()[i]));
  std::vector<bool> sat(variables.size(), false);
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (where[i] >= 0) sat[where[i]] = a.saturated()[i];
  std::map<Exponent, Rational> out;
  for (const auto& [e, c] : a.terms()) {
    Exponent f(variables.size(), 0);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (where[i] < 0) {
        if (e[i] != 0)
          throw ConfigurationError("embed: variable " + a.variables()[i] + " is in use");
        continue;
      }
      f[where[i]] = e[i];
    }
    out.emplace(std::move(f), c);
  }
  return MultiSeries(variables, bounds, std::move(out), std::move(sat));
}

MultiSeries truncate(const MultiSeries& a, std::string_view var, int bound) {
  auto bounds = a.bounds();
  const std::size_t v = a.index_of(var);
  if (bound > bounds[v]) throw RangeError("truncate cannot raise a bound");
  bounds[v] = bound;
  return MultiSeries(a.variables(), std::move(bounds), a.terms(), a.saturated());
}

MultiSeries substitute(const MultiSeries& a, const std::map<std::string, Binding>& bindings) {
  // Result variables: unbound variables of a, then variables of series
  // bindings in binding order.
  std::vector<std::string> vars;
  std::vector<int> bounds;
  std::vector<bool> sat;
  auto add_var = [&](const std::string& name, int bound, bool s) {
    auto it = std::find(vars.begin(), vars.end(), name);
    if (it == vars.end()) {
      vars.push_back(name);
      bounds.push_back(bound);
      sat.push_back(s);
      return;
    }
    const auto i = static_cast<std::size_t>(it - vars.begin());
    bounds[i] = std::min(bounds[i], bound);
    sat[i] = sat[i] || s;
  };
  for (const auto& [name, b] : bindings) a.index_of(name);
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (!bindings.count(a.variables()[i]))
      add_var(a.variables()[i], a.bounds()[i], a.saturated()[i]);
  for (const auto& [name, b] : bindings)
    if (const auto* s = std::get_if<MultiSeries>(&b))
      for (std::size_t i = 0; i < s->arity(); ++i)
        add_var(s->variables()[i], s->bounds()[i], s->saturated()[i]);

  // Exactness: unknown terms of a beyond a saturated bound must land beyond
  // the result bounds.
  for (const auto& [name, b] : bindings) {
    const std::size_t v = a.index_of(name);
    if (!a.saturated()[v]) continue;
    if (const auto* r = std::get_if<Rational>(&b)) {
      if (sgn(*r) != 0)
        throw DomainError("cannot bind saturated variable " + name + " to a nonzero constant");
      continue;
    }
    const auto& s = std::get<MultiSeries>(b);
    bool killed = false;
    for (std::size_t w = 0; w < s.arity() && !killed; ++w) {
      int low = -1;
      for (const auto& [e, c] : s.terms()) low = low < 0 ? e[w] : std::min(low, e[w]);
      const auto it = std::find(vars.begin(), vars.end(), s.variables()[w]);
      const int rb = bounds[static_cast<std::size_t>(it - vars.begin())];
      if (low > 0 && static_cast<long long>(a.bounds()[v] + 1) * low > rb) {
        killed = true;
        sat[static_cast<std::size_t>(it - vars.begin())] = true;
      }
    }
    if (!killed && !s.is_zero())
      throw DomainError("substitution into saturated variable " + name + " is not exact");
  }

  const MultiSeries one = MultiSeries::constant(vars, bounds, 1);
  // Embedded bindings and their cached powers.
  std::map<std::string, std::vector<MultiSeries>> powers;
  std::map<std::string, Rational> scalars;
  for (const auto& [name, b] : bindings) {
    if (const auto* r = std::get_if<Rational>(&b)) {
      scalars[name] = *r;
    } else {
      const auto& s = std::get<MultiSeries>(b);
      std::vector<int> eb(vars.size());
      for (std::size_t i = 0; i < vars.size(); ++i) eb[i] = bounds[i];
      // A binding series may not know every result variable; embed via a
      // wider copy first.
      MultiSeries wide = embed(s, vars, [&] {
        std::vector<int> wb(vars.size(), 0);
        for (std::size_t i = 0; i < vars.size(); ++i)
          wb[i] = s.has_variable(vars[i]) ? s.bounds()[s.index_of(vars[i])] : bounds[i];
        return wb;
      }());
      MultiSeries narrowed(vars, eb, wide.terms(), wide.saturated());
      powers[name] = {one, narrowed};
    }
  }
  auto power = [&](const std::string& name, int m) -> const MultiSeries& {
    auto& p = powers[name];
    while (static_cast<int>(p.size()) <= m) p.push_back(mul(p.back(), p[1]));
    return p[m];
  };

  std::map<Exponent, Rational> acc;
  auto acc_sat = sat;
  for (const auto& [e, c] : a.terms()) {
    Rational coeff = c;
    Exponent base(vars.size(), 0);
    for (std::size_t i = 0; i < a.arity(); ++i) {
      const auto& name = a.variables()[i];
      if (auto it = scalars.find(name); it != scalars.end()) {
        Rational p = 1;
        for (int m = 0; m < e[i]; ++m) p *= it->second;
        coeff *= p;
      } else if (!bindings.count(name)) {
        const auto it2 = std::find(vars.begin(), vars.end(), name);
        base[static_cast<std::size_t>(it2 - vars.begin())] = e[i];
      }
    }
    if (sgn(coeff) == 0) continue;
    MultiSeries term = MultiSeries(vars, bounds, {{base, coeff}}, sat);
    if (term.is_zero()) continue;
    for (std::size_t i = 0; i < a.arity(); ++i) {
      const auto& name = a.variables()[i];
      if (powers.count(name) && e[i] > 0) term = mul(term, power(name, e[i]));
    }
    for (const auto& [te, tc] : term.terms()) acc[te] += tc;
    for (std::size_t i = 0; i < vars.size(); ++i) acc_sat[i] = acc_sat[i] || term.saturated()[i];
  }
  return MultiSeries(vars, bounds, std::move(acc), std::move(acc_sat));
}

}  // namespace cgs::series
