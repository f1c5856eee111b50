#include <cmath>
#include <limits>

#include "cgs/errors.hpp"
#include "cgs/series/multi_series.hpp"

namespace cgs::series {

namespace {

// log2 |q|, finite for q != 0 regardless of magnitude.
double log2_abs(const Rational& q) {
  long en = 0, ed = 0;
  const double mn = mpz_get_d_2exp(&en, q.get_num_mpz_t());
  const double md = mpz_get_d_2exp(&ed, q.get_den_mpz_t());
  return std::log2(std::fabs(mn)) - std::log2(md) + static_cast<double>(en - ed);
}

}  // namespace

Evaluation evaluate(const MultiSeries& a, const std::map<std::string, double>& point, double tol) {
  const std::size_t d = a.arity();
  std::vector<double> lp(d), sign(d);
  for (std::size_t i = 0; i < d; ++i) {
    auto it = point.find(a.variables()[i]);
    if (it == point.end())
      throw ConfigurationError("evaluate: variable " + a.variables()[i] + " is not bound");
    lp[i] = it->second == 0 ? -std::numeric_limits<double>::infinity()
                            : std::log2(std::fabs(it->second));
    sign[i] = it->second < 0 ? -1 : 1;
  }

  std::map<int, double> block;  // graded magnitudes
  double value = 0;
  for (const auto& [e, c] : a.terms()) {
    double l = log2_abs(c);
    double s = sgn(c) < 0 ? -1 : 1;
    int grade = 0;
    bool vanishes = false;
    for (std::size_t i = 0; i < d; ++i) {
      if (e[i] == 0) continue;
      if (std::isinf(lp[i])) {
        vanishes = true;
        break;
      }
      l += e[i] * lp[i];
      if (e[i] % 2) s *= sign[i];
      if (a.saturated()[i]) grade += e[i];
    }
    if (vanishes) continue;
    const double mag = std::exp2(l);
    value += s * mag;
    block[grade] += mag;
  }

  Evaluation out{value, 0.0};
  if (a.any_saturated() && !block.empty()) {
    auto last = block.rbegin();
    auto prev = std::next(last);
    if (prev == block.rend() || last->second == 0) {
      out.tail_bound = last->second == 0 ? 0 : std::numeric_limits<double>::infinity();
    } else {
      const double r =
          std::pow(last->second / prev->second, 1.0 / static_cast<double>(last->first - prev->first));
      out.tail_bound = r < 1 ? last->second * r / (1 - r) : std::numeric_limits<double>::infinity();
    }
  }
  if (!(out.tail_bound <= tol))
    throw PrecisionError("series tail exceeds tolerance", out.tail_bound);
  return out;
}

}  // namespace cgs::series
