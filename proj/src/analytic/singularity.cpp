#include <algorithm>
#include <cmath>
#include <limits>

#include "cgs/analytic/analytic.hpp"
#include "cgs/analytic/numeric_component.hpp"
#include "cgs/errors.hpp"
#include "tail_fit.hpp"

namespace cgs::analytic {

namespace {

using Real = long double;
constexpr double kInf = std::numeric_limits<double>::infinity();

// The tail fit is heuristic, so its result is doubled.
constexpr Real kTailSafety = 2;

}  // namespace

NumericComponent::NumericComponent(const gfchain::FloatComponent& f)
    : exact_(f.exact), scale_(f.scale), rows_(f.order + 1) {
  std::vector<std::pair<int, int>> keys;
  for (const auto& [key, c] : f.terms) {
    if (!(c > 0)) continue;
    const auto [b, a] = key;
    if (b > f.order) continue;
    rows_[b].emplace_back(a, c);
    keys.push_back(key);
    empty_ = false;
  }
  // Affine when every key lies on one line a = alpha b + beta.
  affine_ = !keys.empty();
  if (keys.size() >= 2 && keys[1].first != keys[0].first) {
    const int db = keys[1].first - keys[0].first, da = keys[1].second - keys[0].second;
    affine_ = da % db == 0;
    alpha_ = da / db;
  } else if (keys.size() >= 2) {
    affine_ = false;
  }
  if (affine_) {
    beta_ = keys[0].second - alpha_ * keys[0].first;
    for (const auto& [b, a] : keys) affine_ = affine_ && a == alpha_ * b + beta_;
  }
  if (affine_) {
    dense_.assign(rows_.size(), 0);
    for (std::size_t b = 0; b < rows_.size(); ++b)
      for (const auto& [a, v] : rows_[b]) dense_[b] += v;
  }
}

NumericComponent::Value NumericComponent::at(double x, double y) const {
  const Real xs = x / scale_;
  Real h = 0, hy = 0;
  if (affine_) {
    // H = y^beta S(u) with u = x y^alpha and S(u) = sum c_b u^b;
    // H_y = y^(beta-1) (beta S + alpha T) with T = sum b c_b u^b.
    const Real yl = y;
    const Real u = xs * std::pow(yl, static_cast<Real>(alpha_));
    Real sum = 0, weighted = 0;
    for (std::size_t b = dense_.size(); b-- > 0;) {
      sum = sum * u + dense_[b];
      weighted = weighted * u + dense_[b] * static_cast<Real>(b);
    }
    const Real yb = std::pow(yl, static_cast<Real>(beta_));
    h = yb * sum;
    hy = yb / yl * (beta_ * sum + alpha_ * weighted);
    return {static_cast<double>(h), static_cast<double>(hy)};
  }
  const Real lx = std::log(xs), ly = std::log(static_cast<Real>(y));
  for (std::size_t b = 0; b < rows_.size(); ++b)
    for (const auto& [a, v] : rows_[b]) {
      const Real term = v * std::exp(static_cast<Real>(b) * lx + a * ly);
      h += term;
      hy += a * term;
    }
  return {static_cast<double>(h), static_cast<double>(hy / y)};
}

NumericComponent::Tail NumericComponent::tail(double x, double y) const {
  if (exact_) return {};
  const Real lx = std::log(x / scale_), ly = std::log(static_cast<Real>(y));
  std::vector<std::pair<int, Real>> bh, bhy;
  for (std::size_t b = 1; b < rows_.size(); ++b) {
    if (rows_[b].empty()) continue;
    // Row sums in log form; a*ly alone can leave long double range.
    Real top = -std::numeric_limits<Real>::infinity();
    for (const auto& [a, v] : rows_[b]) top = std::max(top, std::log(v) + a * ly);
    Real m = 0, my = 0;
    for (const auto& [a, v] : rows_[b]) {
      const Real term = std::exp(std::log(v) + a * ly - top);
      m += term;
      my += a * term;
    }
    const Real base = static_cast<Real>(b) * lx + top;
    if (m > 0) bh.emplace_back(static_cast<int>(b), std::log(m) + base);
    if (my > 0) bhy.emplace_back(static_cast<int>(b), std::log(my) + base - ly);
  }
  Tail t;
  t.h = static_cast<double>(kTailSafety * detail::fitted_tail(bh, &t.log_ratio));
  t.h_y = static_cast<double>(kTailSafety * detail::fitted_tail(bhy));
  return t;
}

double NumericComponent::maximiser(double x, double dh, double dhy) const {
  // y -> y - exp(H + dh) is concave; its slope 1 - exp(H + dh)(H_y + dhy)
  // is decreasing in y.
  auto slope = [&](double y) {
    const auto v = at(x, y);
    return 1 - std::exp(v.h + dh) * (v.h_y + dhy);
  };
  if (!(slope(std::numeric_limits<double>::min()) > 0)) return 0;
  double lo = 0, hi = 1;
  while (slope(hi) > 0) {
    lo = hi;
    hi *= 2;
    if (hi > 1e300) throw DomainError("component series does not grow in the root variable");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

bool NumericComponent::has_fixed_point(double x, double dh, double dhy) const {
  // phi(y) = y - exp(H + dh) is concave: stop as soon as a point with
  // phi >= 0 is seen or the tangents at the bracket ends cap phi below 0.
  struct Point {
    double y, phi, slope;
  };
  auto eval = [&](double y) {
    const auto v = at(x, y);
    const double e = std::exp(v.h + dh);
    return Point{y, y - e, 1 - e * (v.h_y + dhy)};
  };
  Point lo = eval(std::numeric_limits<double>::min());
  if (!(lo.slope > 0)) return false;
  Point hi = eval(1);
  while (hi.slope > 0) {
    if (hi.phi >= 0) return true;
    lo = hi;
    hi = eval(2 * hi.y);
    if (hi.y > 1e300) throw DomainError("component series does not grow in the root variable");
  }
  if (hi.phi >= 0) return true;
  for (int it = 0; it < 200; ++it) {
    const double w = hi.y - lo.y;
    if (!std::isfinite(hi.phi) || !std::isfinite(hi.slope)) {
      const Point m = eval(lo.y + 0.5 * w);
      if (m.phi >= 0) return true;
      (m.slope > 0 ? lo : hi) = m;
      continue;
    }
    const double t = (hi.phi - lo.phi + lo.slope * lo.y - hi.slope * hi.y) / (lo.slope - hi.slope);
    const double cap = lo.phi + lo.slope * (t - lo.y);
    if (cap < 0) return false;
    if (w <= 1e-16 * hi.y) return false;
    const double next = t > lo.y + 0.05 * w && t < hi.y - 0.05 * w ? t : lo.y + 0.5 * w;
    const Point m = eval(next);
    if (m.phi >= 0) return true;
    (m.slope > 0 ? lo : hi) = m;
  }
  return false;
}

double NumericComponent::critical_x(double dh, double dhy, double& width) const {
  double lo = 0, hi = 1;
  while (has_fixed_point(hi, dh, dhy)) {
    lo = hi;
    hi *= 2;
    if (hi > 1e6) throw DomainError("no singularity found");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (has_fixed_point(mid, dh, dhy) ? lo : hi) = mid;
  }
  width = hi - lo;
  return lo;
}

namespace {

Singularity attempt(const std::shared_ptr<const gfchain::FloatComponent>& comp, double& log_ratio) {
  const NumericComponent h(*comp);
  if (h.empty()) throw DomainError("empty component series");
  Singularity s;
  s.component = comp;
  double width = 0;
  s.rho = h.critical_x(0, 0, width);
  s.y = h.maximiser(s.rho, 0, 0);
  const auto tail = h.tail(s.rho, s.y);
  s.tail = tail.h;
  log_ratio = tail.log_ratio;
  if (!std::isfinite(tail.h) || !std::isfinite(tail.h_y)) {
    s.rho_err = s.y_err = kInf;
    return s;
  }
  // The truncated series underestimates H and H_y; adding the tail bounds
  // moves the singularity down, bracketing the true one.
  double width_lo = 0;
  const double rho_lo = h.critical_x(tail.h, tail.h_y, width_lo);
  const double y_lo = h.maximiser(rho_lo, tail.h, tail.h_y);
  s.rho_err = (s.rho - rho_lo) + width + width_lo;
  s.y_err = std::fabs(s.y - y_lo) + 1e-15 * s.y;
  return s;
}

}  // namespace

Singularity find_singularity(const GFChain& chain, const SingularityOptions& opts) {
  if (!(opts.tol > 0)) throw ConfigurationError("singularity tolerance must be positive");
  std::shared_ptr<const gfchain::FloatComponent> comp =
      std::make_shared<gfchain::FloatComponent>(gfchain::float_component_exact(chain, 1.0L));
  const int max_order = std::min(opts.max_order, gfchain::max_float_order(chain.t()));
  for (;;) {
    double log_ratio = 0;
    Singularity s = attempt(comp, log_ratio);
    const double achieved = std::max(s.rho_err, s.y_err);
    if (achieved <= opts.tol) return s;
    if (comp->exact || comp->order >= max_order)
      throw PrecisionError("singularity not certified to tolerance", achieved);
    // With a usable decay estimate, aim for a tenth of tol; otherwise grow 4x.
    int next = std::max(4 * comp->order, 4096);
    if (std::isfinite(achieved) && log_ratio < 0) {
      const double extra = std::log(opts.tol / (10 * achieved)) / log_ratio;
      next = std::max(comp->order + comp->order / 4, comp->order + static_cast<int>(std::ceil(extra)));
    }
    next = std::min(next, max_order);
    // x1 stands for x*y when k = 1.
    long double scale = chain.k() == 1 ? s.rho * s.y : s.rho;
    if (!(scale > 0) || !std::isfinite(static_cast<double>(scale))) scale = comp->scale;
    comp = std::make_shared<gfchain::FloatComponent>(gfchain::float_component(chain, next, scale));
  }
}

}  // namespace cgs::analytic
