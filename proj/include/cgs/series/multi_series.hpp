#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <gmpxx.h>

namespace cgs::series {

using Rational = mpq_class;
using Exponent = std::vector<int>;

// Truncated multivariate power series with exact rational coefficients.
//
// Each variable carries an inclusive exponent bound. A variable is flagged
// saturated when some operation had to drop a nonzero contribution beyond its
// bound, i.e. the stored coefficients are exact but the series is not a
// polynomial in that variable.
class MultiSeries {
 public:
  MultiSeries() = default;
  MultiSeries(std::vector<std::string> variables, std::vector<int> bounds);
  MultiSeries(std::vector<std::string> variables, std::vector<int> bounds,
              std::map<Exponent, Rational> terms, std::vector<bool> saturated = {});

  static MultiSeries constant(std::vector<std::string> variables, std::vector<int> bounds,
                              const Rational& c);
  static MultiSeries variable(std::vector<std::string> variables, std::vector<int> bounds,
                              std::string_view name);
  static MultiSeries monomial(std::vector<std::string> variables, std::vector<int> bounds,
                              const Exponent& e, const Rational& c);

  const std::vector<std::string>& variables() const { return vars_; }
  const std::vector<int>& bounds() const { return bounds_; }
  const std::vector<bool>& saturated() const { return saturated_; }
  const std::map<Exponent, Rational>& terms() const { return terms_; }

  std::size_t arity() const { return vars_.size(); }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool has_variable(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;
  int bound(std::string_view name) const { return bounds_[index_of(name)]; }
  bool saturated_in(std::string_view name) const { return saturated_[index_of(name)]; }
  bool any_saturated() const;

  // Exponent must be within the bounds; otherwise RangeError.
  Rational coefficient(const Exponent& e) const;
  Rational constant_term() const;
  // Largest exponent of the variable that carries a nonzero coefficient.
  int degree_in(std::string_view name) const;

  bool same_space(const MultiSeries& other) const;
  bool operator==(const MultiSeries& other) const;

 private:
  void normalise();

  std::vector<std::string> vars_;
  std::vector<int> bounds_;
  std::vector<bool> saturated_;
  std::map<Exponent, Rational> terms_;
};

MultiSeries operator+(const MultiSeries& a, const MultiSeries& b);
MultiSeries operator-(const MultiSeries& a, const MultiSeries& b);
MultiSeries operator*(const MultiSeries& a, const MultiSeries& b);
MultiSeries operator*(const Rational& c, const MultiSeries& a);

MultiSeries add(const MultiSeries& a, const MultiSeries& b);
MultiSeries mul(const MultiSeries& a, const MultiSeries& b);
MultiSeries exp(const MultiSeries& a);
// Antiderivative in one variable with zero constant of integration. Terms
// pushed past the bound are dropped and the variable flagged saturated.
MultiSeries integrate(const MultiSeries& a, std::string_view var);
// Derivative in one variable. If the input is saturated in that variable its
// top coefficient is unknown, so the bound of the result drops by one.
MultiSeries differentiate(const MultiSeries& a, std::string_view var);
// Multiply by var^delta, moving the bound with the exponents (exactness is
// preserved). Negative delta requires every exponent to stay nonnegative.
MultiSeries shift(const MultiSeries& a, std::string_view var, int delta);
// Re-express over another variable list. Variables missing from the target
// must not occur in any term.
MultiSeries embed(const MultiSeries& a, const std::vector<std::string>& variables,
                  const std::vector<int>& bounds);
// Lower the bound of one variable, dropping terms beyond it.
MultiSeries truncate(const MultiSeries& a, std::string_view var, int bound);

using Binding = std::variant<Rational, MultiSeries>;

// Exact composition. Bound variables are eliminated; variables of series
// bindings are merged into the result (bounds of shared names take the
// minimum). A series binding with nonzero constant term into a saturated
// variable, or a rational binding into a saturated variable, cannot be exact
// and raises DomainError.
MultiSeries substitute(const MultiSeries& a, const std::map<std::string, Binding>& bindings);

struct Evaluation {
  double value = 0;
  double tail_bound = 0;
};

// Numeric evaluation at a point (every variable must be bound). The tail bound
// is a geometric extrapolation from the last two nonzero graded blocks, graded
// by total degree in the saturated variables; exact polynomials have bound 0.
// PrecisionError if the bound exceeds tol.
Evaluation evaluate(const MultiSeries& a, const std::map<std::string, double>& point,
                    double tol);

}  // namespace cgs::series
