#include "cgs/errors.hpp"
#include "cgs/gfchain/chain.hpp"

namespace cgs::gfchain {

// With Z = x Y we have Z = x exp(H(Z)), so [x^n] Y = [u^n] B(u)^(n+1) / (n+1)
// where B = exp(H). Everything is carried in labelled form (j! [u^j]) so all
// intermediate values are integers.
mpz_class rooted_count_lagrange(const GFChain& chain, int n) {
  if (chain.k() != 1) throw DomainError("Lagrange extraction applies to k = 1 only");
  if (n < 0) throw RangeError("negative size");
  const MultiSeries& h = chain.component(1);
  if (n > h.bound("x1")) throw RangeError("component series too short for this size");

  std::vector<mpz_class> hl(n + 1);
  {
    std::vector<mpq_class> sums(n + 1);
    const std::size_t x1 = h.index_of("x1");
    for (const auto& [e, c] : h.terms())
      if (e[x1] <= n) sums[e[x1]] += c;
    mpz_class f = 1;
    for (int d = 0; d <= n; ++d) {
      if (d > 0) f *= d;
      mpq_class v = sums[d] * f;
      if (v.get_den() != 1) throw ConsistencyError("component series is not integral");
      hl[d] = v.get_num();
    }
    if (sgn(hl[0]) != 0) throw ConsistencyError("component series has a constant term");
  }

  std::vector<mpz_class> row(n + 1);
  auto binomial_row = [&](int m) {
    for (int i = 0; i <= m; ++i) mpz_bin_uiui(row[i].get_mpz_t(), m, i);
  };

  // B = exp(H), labelled.
  std::vector<mpz_class> b(n + 1);
  b[0] = 1;
  mpz_class tmp;
  for (int m = 1; m <= n; ++m) {
    binomial_row(m - 1);
    for (int i = 1; i <= m; ++i) {
      if (sgn(hl[i]) == 0) continue;
      tmp = row[i - 1] * hl[i];
      mpz_addmul(b[m].get_mpz_t(), tmp.get_mpz_t(), b[m - i].get_mpz_t());
    }
  }

  // C = B^p with p = n + 1: j C_j = sum_i ((p + 1) i - j) B_i C_{j-i}.
  const long p = n + 1;
  std::vector<mpz_class> c(n + 1);
  c[0] = 1;
  for (int j = 1; j <= n; ++j) {
    binomial_row(j);
    mpz_class acc = 0;
    for (int i = 1; i <= j; ++i) {
      if (sgn(b[i]) == 0) continue;
      tmp = row[i] * b[i];
      tmp *= (p + 1) * i - j;
      mpz_addmul(acc.get_mpz_t(), tmp.get_mpz_t(), c[j - i].get_mpz_t());
    }
    if (!mpz_divisible_ui_p(acc.get_mpz_t(), static_cast<unsigned long>(j)))
      throw ConsistencyError("power recurrence produced a non-integer");
    mpz_divexact_ui(c[j].get_mpz_t(), acc.get_mpz_t(), static_cast<unsigned long>(j));
  }
  if (!mpz_divisible_ui_p(c[n].get_mpz_t(), static_cast<unsigned long>(p)))
    throw ConsistencyError("Lagrange coefficient is not divisible by n + 1");
  mpz_class out;
  mpz_divexact_ui(out.get_mpz_t(), c[n].get_mpz_t(), static_cast<unsigned long>(p));
  return out;
}

}  // namespace cgs::gfchain
