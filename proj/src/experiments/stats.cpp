#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "cgs/errors.hpp"
#include "cgs/experiments/stats.hpp"

namespace cgs::experiments {

namespace {

double central_moment(const std::vector<double>& x, double mean, int p) {
  double s = 0;
  for (double v : x) s += std::pow(v - mean, p);
  return s / static_cast<double>(x.size());
}

double chi_square_tail(double stat, double df) {
  if (df <= 0) return 1;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), stat));
}

Eigen::MatrixXd as_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.size() < 2) throw DomainError("need at least two rows");
  const auto d = rows[0].size();
  Eigen::MatrixXd m(rows.size(), d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d) throw DomainError("ragged rows");
    for (std::size_t j = 0; j < d; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace

Summary summarize(const std::vector<double>& x) {
  Summary s;
  s.count = static_cast<long long>(x.size());
  if (x.empty()) return s;
  s.mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  if (x.size() > 1) {
    double ss = 0;
    for (double v : x) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / (x.size() - 1));
    s.se = s.sd / std::sqrt(static_cast<double>(x.size()));
  }
  return s;
}

double skewness(const std::vector<double>& x) {
  const double m = summarize(x).mean;
  const double m2 = central_moment(x, m, 2);
  return m2 > 0 ? central_moment(x, m, 3) / std::pow(m2, 1.5) : 0;
}

double excess_kurtosis(const std::vector<double>& x) {
  const double m = summarize(x).mean;
  const double m2 = central_moment(x, m, 2);
  return m2 > 0 ? central_moment(x, m, 4) / (m2 * m2) - 3 : 0;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DomainError("x and y differ in length");
  LinearFit f;
  f.count = static_cast<long long>(x.size());
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (x.size() < 2 || sxx == 0) throw DomainError("need two distinct x values");
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  const double sse = std::max(0.0, syy - f.slope * sxy);
  f.r2 = syy > 0 ? 1 - sse / syy : 1;
  if (x.size() > 2) f.slope_se = std::sqrt(sse / (n - 2) / sxx);
  return f;
}

ChiSquare chi_square(const std::vector<long long>& observed, const std::vector<double>& prob) {
  if (observed.size() != prob.size()) throw DomainError("cell count mismatch");
  const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
  ChiSquare c;
  int cells = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (prob[i] <= 0) {
      if (observed[i] > 0) {
        c.statistic = HUGE_VAL;
        c.p_value = 0;
      }
      continue;
    }
    const double e = total * prob[i];
    c.statistic += (observed[i] - e) * (observed[i] - e) / e;
    ++cells;
  }
  c.df = std::max(cells - 1, 0);
  if (std::isfinite(c.statistic)) c.p_value = chi_square_tail(c.statistic, c.df);
  return c;
}

double total_variation(const std::map<std::string, double>& p,
                       const std::map<std::string, double>& q) {
  double s = 0;
  for (const auto& [k, v] : p) {
    auto it = q.find(k);
    s += std::abs(v - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : q)
    if (!p.count(k)) s += std::abs(v);
  return s / 2;
}

KolmogorovSmirnov ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  KolmogorovSmirnov r;
  std::size_t i = 0, j = 0;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    r.distance = std::max(r.distance, std::abs(i / na - j / nb));
  }
  // Kolmogorov series for the limiting law of sqrt(m) D.
  const double m = na * nb / (na + nb);
  const double lambda = (std::sqrt(m) + 0.12 + 0.11 / std::sqrt(m)) * r.distance;
  if (lambda < 0.2) return r;
  double p = 0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2 * ((k % 2) ? 1 : -1) * std::exp(-2.0 * k * k * lambda * lambda);
    p += term;
    if (std::abs(term) < 1e-16) break;
  }
  r.p_value = std::clamp(p, 0.0, 1.0);
  return r;
}

TailBound fit_gaussian_tail(const std::vector<std::pair<long long, std::vector<double>>>& samples,
                            long long min_count) {
  struct Point {
    double u, s;
  };
  std::vector<Point> all, tail;
  for (auto [n, xs] : samples) {
    std::sort(xs.begin(), xs.end());
    const double m = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i && xs[i] == xs[i - 1]) continue;
      // Survival at x = xs[i]: share of samples >= x.
      const double s = (m - i) / m;
      const Point p{xs[i] * xs[i] / static_cast<double>(n), s};
      all.push_back(p);
      if (s <= 0.5 && static_cast<long long>(m - i) >= min_count) tail.push_back(p);
    }
  }
  TailBound b;
  b.points = static_cast<long long>(tail.size());
  if (tail.size() < 2) return b;
  std::vector<double> u, y;
  for (const auto& p : tail) {
    u.push_back(p.u);
    y.push_back(-std::log(p.s));
  }
  b.c = linear_fit(u, y).slope;
  for (const auto& p : all) b.C = std::max(b.C, p.s * std::exp(b.c * p.u));
  return b;
}

Moments moments(const std::vector<std::vector<double>>& rows) {
  const Eigen::MatrixXd m = as_matrix(rows);
  const Eigen::RowVectorXd mean = m.colwise().mean();
  const Eigen::MatrixXd centered = m.rowwise() - mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / double(m.rows() - 1);
  Moments out;
  out.mean.assign(mean.data(), mean.data() + mean.size());
  out.covariance.assign(cov.rows(), std::vector<double>(cov.cols()));
  for (Eigen::Index i = 0; i < cov.rows(); ++i)
    for (Eigen::Index j = 0; j < cov.cols(); ++j) out.covariance[i][j] = cov(i, j);
  return out;
}

std::pair<double, double> smallest_eigenvalue(const std::vector<std::vector<double>>& rows) {
  const Eigen::MatrixXd m = as_matrix(rows);
  const Eigen::MatrixXd centered = m.rowwise() - m.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / double(m.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const double lambda = eig.eigenvalues()(0);
  const Eigen::VectorXd proj = centered * eig.eigenvectors().col(0);
  const double m4 = proj.array().pow(4).mean();
  const double se = std::sqrt(std::max(0.0, m4 - lambda * lambda) / double(m.rows()));
  return {lambda, se};
}

Mardia mardia(const std::vector<std::vector<double>>& rows) {
  const Eigen::MatrixXd m = as_matrix(rows);
  const double n = double(m.rows());
  const double d = double(m.cols());
  const Eigen::MatrixXd centered = m.rowwise() - m.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / n;
  // Whitened rows; the n x n Gram matrix is never stored.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  Eigen::VectorXd inv_sqrt = eig.eigenvalues();
  const double floor = 1e-12 * std::max(1.0, inv_sqrt.maxCoeff());
  for (Eigen::Index i = 0; i < inv_sqrt.size(); ++i)
    inv_sqrt(i) = inv_sqrt(i) > floor ? 1 / std::sqrt(inv_sqrt(i)) : 0;
  const Eigen::MatrixXd w = centered * eig.eigenvectors() * inv_sqrt.asDiagonal();
  Mardia r;
  double skew = 0, kurt = 0;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    const double gii = w.row(i).squaredNorm();
    kurt += gii * gii;
    skew += gii * gii * gii;
    for (Eigen::Index j = i + 1; j < w.rows(); ++j) {
      const double gij = w.row(i).dot(w.row(j));
      skew += 2 * gij * gij * gij;
    }
  }
  r.skewness = skew / (n * n);
  r.kurtosis = kurt / n;
  r.skewness_p = chi_square_tail(n * r.skewness / 6, d * (d + 1) * (d + 2) / 6);
  const double z = (r.kurtosis - d * (d + 2)) / std::sqrt(8 * d * (d + 2) / n);
  r.kurtosis_p = 2 * boost::math::cdf(boost::math::complement(boost::math::normal(), std::abs(z)));
  return r;
}

}  // namespace cgs::experiments
