#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace cgs::experiments {

struct Summary {
  long long count = 0;
  double mean = 0, sd = 0, se = 0;
};
Summary summarize(const std::vector<double>& x);

// Standardized third moment and excess kurtosis (population moments).
double skewness(const std::vector<double>& x);
double excess_kurtosis(const std::vector<double>& x);

struct LinearFit {
  double slope = 0, intercept = 0;
  double slope_se = 0;
  double r2 = 0;
  long long count = 0;
};
// Least squares y = slope * x + intercept. DomainError with fewer than two
// distinct x.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

struct ChiSquare {
  double statistic = 0;
  int df = 0;
  double p_value = 1;
};
// Goodness of fit of counts against cell probabilities summing to 1.
ChiSquare chi_square(const std::vector<long long>& observed, const std::vector<double>& prob);

double total_variation(const std::map<std::string, double>& p,
                       const std::map<std::string, double>& q);

struct KolmogorovSmirnov {
  double distance = 0;
  double p_value = 1;  // asymptotic
};
KolmogorovSmirnov ks_two_sample(std::vector<double> a, std::vector<double> b);

// Gaussian tail P(X >= x) <= C exp(-c x^2 / n) over samples at several n.
// c is the least-squares slope of -log P(X >= x) against x^2 / n over the
// tail points (at least min_count observations beyond x, survival at most
// 1/2); C is then the smallest constant making the bound hold at every
// observed x.
struct TailBound {
  double C = 0, c = 0;
  long long points = 0;
};
TailBound fit_gaussian_tail(const std::vector<std::pair<long long, std::vector<double>>>& samples,
                            long long min_count = 5);

struct Moments {
  std::vector<double> mean;
  std::vector<std::vector<double>> covariance;  // divisor count - 1
};
Moments moments(const std::vector<std::vector<double>>& rows);

// Smallest eigenvalue of the sample covariance and its standard error from
// the fourth moment of the projection onto its eigenvector.
std::pair<double, double> smallest_eigenvalue(const std::vector<std::vector<double>>& rows);

// Mardia's multivariate skewness and kurtosis with their asymptotic
// p-values.
struct Mardia {
  double skewness = 0, kurtosis = 0;
  double skewness_p = 1, kurtosis_p = 1;
};
Mardia mardia(const std::vector<std::vector<double>>& rows);

}  // namespace cgs::experiments
