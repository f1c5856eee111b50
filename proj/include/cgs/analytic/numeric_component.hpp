#pragma once

#include <utility>
#include <vector>

#include "cgs/gfchain/float_chain.hpp"

namespace cgs::analytic {

// The last-level component series H(x, y) with x = x1 and y = x_k (for k = 1
// the single variable is x*y), other variables set to 1. Coefficients are
// held pre-scaled as in FloatComponent so large orders stay in range.
class NumericComponent {
 public:
  struct Value {
    double h = 0;
    double h_y = 0;
  };
  // Upper bounds on the parts of H and H_y beyond the stored order.
  struct Tail {
    double h = 0;
    double h_y = 0;
    double log_ratio = 0;  // fitted per-grade decay ln q of H, NaN if none
  };

  explicit NumericComponent(const gfchain::FloatComponent& f);

  int order() const { return static_cast<int>(rows_.size()) - 1; }
  bool empty() const { return empty_; }
  Value at(double x, double y) const;
  // Fits m_b ~ A b^-alpha q^b to the x-graded blocks near the top and sums
  // the continuation. Zero for polynomial series, infinite when q >= 1.
  Tail tail(double x, double y) const;

  // Argmax over y of y - exp(H(x, y) + dh), with H_y shifted by dhy.
  double maximiser(double x, double dh, double dhy) const;
  bool has_fixed_point(double x, double dh, double dhy) const;
  // Supremum of x with a fixed point; width receives the final bracket width.
  double critical_x(double dh, double dhy, double& width) const;

 private:
  // Every term x^b y^a has a = alpha_ b + beta_ (k = 1 gives alpha 1, beta 0).
  bool affine_ = false;
  int alpha_ = 0, beta_ = 0;
  bool exact_ = false;
  bool empty_ = true;
  long double scale_ = 1;
  // rows_[b]: (y exponent, scaled coefficient) pairs.
  std::vector<std::vector<std::pair<int, long double>>> rows_;
  std::vector<long double> dense_;  // row sums, filled when affine_
};

}  // namespace cgs::analytic
