#include "tail_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cgs::analytic::detail {

long double fitted_tail(const std::vector<std::pair<int, long double>>& blocks, double* log_ratio) {
  using Real = long double;
  constexpr Real kInf = std::numeric_limits<Real>::infinity();
  if (log_ratio) *log_ratio = std::numeric_limits<double>::quiet_NaN();
  if (blocks.size() < 3) return kInf;
  const int top = blocks.back().first;
  std::vector<std::pair<int, Real>> pts;
  for (double frac : {0.5, 0.75}) {
    auto it = std::lower_bound(blocks.begin(), blocks.end(), static_cast<int>(frac * top),
                               [](const auto& p, int b) { return p.first < b; });
    if (it >= blocks.end() - 1) it = blocks.end() - 2;
    pts.push_back(*it);
  }
  pts.push_back(blocks.back());
  if (pts[0].first >= pts[1].first) pts[0] = blocks.front();
  const Real b1 = pts[0].first, b2 = pts[1].first, b3 = pts[2].first;
  if (b1 >= b2 || b2 >= b3) return kInf;
  // ln m = A - alpha ln b + b ln q; eliminate A between consecutive points.
  const Real l1 = std::log(b1), l2 = std::log(b2), l3 = std::log(b3);
  const Real d21 = pts[1].second - pts[0].second, d32 = pts[2].second - pts[1].second;
  const Real det = -(l2 - l1) * (b3 - b2) + (l3 - l2) * (b2 - b1);
  if (det == 0) return kInf;
  const Real alpha = (d21 * (b3 - b2) - d32 * (b2 - b1)) / det;
  const Real lnq = (-(l2 - l1) * d32 + (l3 - l2) * d21) / det;
  if (log_ratio) *log_ratio = static_cast<double>(lnq);
  if (!(lnq < 0)) return kInf;

  // Nonzero blocks sit on a lattice of step g.
  int g = 0;
  for (const auto& [b, l] : blocks) g = std::gcd(g, b - blocks.front().first);
  if (g == 0) g = 1;
  const Real mlast = std::exp(pts[2].second);
  const Real step = g * lnq;
  if (alpha >= 0) return mlast * std::exp(step) / -std::expm1(step);
  Real sum = 0;
  for (long j = 1;; ++j) {
    const Real b = b3 + static_cast<Real>(j) * g;
    const Real term = mlast * std::exp(-alpha * (std::log(b) - l3) + j * step);
    sum += term;
    if (term < 1e-30L * sum || j > 100000000) break;
  }
  return sum;
}

}  // namespace cgs::analytic::detail
