#include "cgs/gfchain/implicit_kernel.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include <omp.h>

#include "cgs/errors.hpp"

namespace cgs::gfchain {

std::uint64_t pack(const std::vector<int>& exponents) {
  if (exponents.size() > kMaxPackedVariables)
    throw ConfigurationError("too many packed variables");
  std::uint64_t key = 0;
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (exponents[i] < 0 || exponents[i] > kMaxPackedExponent)
      throw ConfigurationError("exponent does not fit the packed representation");
    key |= static_cast<std::uint64_t>(exponents[i]) << (16 * i);
  }
  return key;
}

std::vector<int> unpack(std::uint64_t key, std::size_t count) {
  std::vector<int> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = static_cast<int>((key >> (16 * i)) & 0xffff);
  return out;
}

namespace {

using Accumulator = std::map<std::uint64_t, mpz_class>;

struct Space {
  std::vector<int> bounds;

  // Field-wise sum of two keys; false (and flags set) when a bound is exceeded.
  bool combine(std::uint64_t a, std::uint64_t b, std::uint64_t& out,
               std::vector<char>& overflow) const {
    bool ok = true;
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      const int s = static_cast<int>((a >> (16 * i)) & 0xffff) + static_cast<int>((b >> (16 * i)) & 0xffff);
      if (s > bounds[i]) {
        overflow[i] = 1;
        ok = false;
      }
    }
    if (ok) out = a + b;
    return ok;
  }
};

Slice to_slice(Accumulator& acc) {
  Slice s;
  s.reserve(acc.size());
  for (auto& [k, v] : acc)
    if (sgn(v) != 0) s.emplace_back(k, std::move(v));
  return s;
}

void addmul(Accumulator& acc, const Slice& a, const Slice& b, const Space& space,
            std::vector<char>& overflow) {
  std::uint64_t key = 0;
  for (const auto& [ka, va] : a)
    for (const auto& [kb, vb] : b)
      if (space.combine(ka, kb, key, overflow)) mpz_addmul(acc[key].get_mpz_t(), va.get_mpz_t(), vb.get_mpz_t());
}

void add_shifted(Accumulator& acc, const Slice& a, std::uint64_t by, const mpz_class& scale,
                 const Space& space, std::vector<char>& overflow) {
  std::uint64_t key = 0;
  for (const auto& [ka, va] : a)
    if (space.combine(ka, by, key, overflow)) mpz_addmul(acc[key].get_mpz_t(), va.get_mpz_t(), scale.get_mpz_t());
}

Slice scaled(const Slice& a, const mpz_class& c) {
  Slice out = a;
  for (auto& [k, v] : out) v *= c;
  return out;
}

std::vector<mpz_class> binomial_row(int n) {
  std::vector<mpz_class> row(n + 1);
  for (int i = 0; i <= n; ++i) mpz_bin_uiui(row[i].get_mpz_t(), n, i);
  return row;
}

struct Plan {
  int order = 0;
  int max_marked = 0;
  std::vector<int> limit;  // limit[m]: highest grade of the m-th power that is ever read
};

Plan make_plan(const ImplicitProblem& p) {
  Plan plan;
  plan.order = p.order;
  if (p.order < 0) throw ConfigurationError("negative order");
  if (p.bounds.size() > kMaxPackedVariables) throw ConfigurationError("too many packed variables");
  for (const auto& t : p.terms) {
    if (t.grade < 1)
      throw ConsistencyError("component series has a term of grade 0; equation is not triangular");
    if (t.marked < 0) throw ConsistencyError("negative marked exponent");
    plan.max_marked = std::max(plan.max_marked, t.marked);
  }
  const int none = std::numeric_limits<int>::max();
  std::vector<int> dmin(plan.max_marked + 1, none);
  for (const auto& t : p.terms) dmin[t.marked] = std::min(dmin[t.marked], t.grade);
  plan.limit.assign(plan.max_marked + 1, -1);
  int run = -1;
  for (int m = plan.max_marked; m >= 0; --m) {
    if (dmin[m] != none) run = std::max(run, p.order - dmin[m]);
    plan.limit[m] = run;
  }
  return plan;
}

Slice component_grade(const ImplicitProblem& p, int n, const std::vector<std::vector<Slice>>& powers,
                      const std::vector<mpz_class>& binom, const Space& space,
                      std::vector<char>& overflow) {
  Accumulator acc;
  for (const auto& t : p.terms) {
    if (t.grade > n) continue;
    const Slice& pw = powers[t.marked][n - t.grade];
    if (pw.empty()) continue;
    add_shifted(acc, pw, t.key, binom[t.grade] * t.value, space, overflow);
  }
  return to_slice(acc);
}

Slice exp_grade(int n, const std::vector<Slice>& s, const std::vector<Slice>& y, const Space& space,
                std::vector<char>& overflow) {
  Accumulator acc;
  const auto binom = binomial_row(n - 1);
  for (int i = 1; i <= n; ++i) {
    if (s[i].empty() || y[n - i].empty()) continue;
    addmul(acc, scaled(s[i], binom[i - 1]), y[n - i], space, overflow);
  }
  return to_slice(acc);
}

ImplicitSolution finish(std::vector<Slice> y, const std::vector<char>& overflow) {
  ImplicitSolution out;
  out.labelled = std::move(y);
  for (char c : overflow) out.saturated.push_back(c != 0);
  return out;
}

}  // namespace

ImplicitSolution solve_implicit_serial(const ImplicitProblem& p) {
  const Plan plan = make_plan(p);
  const Space space{p.bounds};
  std::vector<char> overflow(p.bounds.size(), 0);
  const int N = plan.order;
  const int M = plan.max_marked;
  const Slice one{{0, mpz_class(1)}};

  std::vector<Slice> y(N + 1), s(N + 1);
  y[0] = one;
  std::vector<std::vector<Slice>> powers(M + 1);
  for (int m = 0; m <= M; ++m) {
    powers[m].resize(std::max(plan.limit[m], 0) + 1);
    powers[m][0] = one;
  }
  for (int n = 1; n <= N; ++n) {
    const auto binom = binomial_row(n);
    s[n] = component_grade(p, n, powers, binom, space, overflow);
    y[n] = exp_grade(n, s, y, space, overflow);
    for (int m = 1; m <= M; ++m) {
      if (plan.limit[m] < n) break;
      Accumulator acc;
      for (int i = 0; i <= n; ++i) {
        if (y[i].empty() || powers[m - 1][n - i].empty()) continue;
        addmul(acc, scaled(y[i], binom[i]), powers[m - 1][n - i], space, overflow);
      }
      powers[m][n] = to_slice(acc);
    }
  }
  return finish(std::move(y), overflow);
}

ImplicitSolution solve_implicit_parallel(const ImplicitProblem& p) {
  const Plan plan = make_plan(p);
  const Space space{p.bounds};
  std::vector<char> overflow(p.bounds.size(), 0);
  const int N = plan.order;
  const int M = plan.max_marked;
  const Slice one{{0, mpz_class(1)}};

  std::vector<Slice> y(N + 1), s(N + 1);
  y[0] = one;
  std::vector<std::vector<Slice>> powers(M + 1);
  for (int m = 0; m <= M; ++m) {
    powers[m].resize(std::max(plan.limit[m], 0) + 1);
    powers[m][0] = one;
  }
  std::vector<Slice> fresh(M + 1);
  for (int n = 1; n <= N; ++n) {
    const auto binom = binomial_row(n);
    s[n] = component_grade(p, n, powers, binom, space, overflow);
    y[n] = exp_grade(n, s, y, space, overflow);

    int top = 0;
    while (top < M && plan.limit[top + 1] >= n) ++top;
    std::vector<Slice> weighted(n + 1);
    for (int i = 1; i <= n; ++i) weighted[i] = scaled(y[i], binom[i]);

    // Power m at grade n = (part using y[1..n]) + y[0] * power m-1 at grade n.
    // The first part only reads completed grades, so it is computed for all m
    // at once; the second is a running sum.
#pragma omp parallel
    {
      std::vector<char> local(overflow.size(), 0);
#pragma omp for schedule(dynamic)
      for (int m = 1; m <= top; ++m) {
        Accumulator acc;
        for (int i = 1; i <= n; ++i) {
          if (weighted[i].empty() || powers[m - 1][n - i].empty()) continue;
          addmul(acc, weighted[i], powers[m - 1][n - i], space, local);
        }
        fresh[m] = to_slice(acc);
      }
#pragma omp critical
      for (std::size_t i = 0; i < local.size(); ++i) overflow[i] |= local[i];
    }
    for (int m = 1; m <= top; ++m) {
      Accumulator acc;
      for (auto& [k, v] : fresh[m]) acc[k] += v;
      for (const auto& [k, v] : powers[m - 1][n]) acc[k] += v;
      powers[m][n] = to_slice(acc);
      fresh[m].clear();
    }
  }
  return finish(std::move(y), overflow);
}

}  // namespace cgs::gfchain
