#include "doctest.h"

#include <cmath>

#include "cgs/errors.hpp"
#include "cgs/rng.hpp"
#include "cgs/series/multi_series.hpp"

using namespace cgs::series;

namespace {

const std::vector<std::string> kXY = {"x", "y"};

MultiSeries random_series(cgs::Rng& rng, std::vector<int> bounds, bool zero_constant) {
  std::map<Exponent, Rational> terms;
  for (int i = 0; i <= bounds[0]; ++i)
    for (int j = 0; j <= bounds[1]; ++j) {
      if (zero_constant && i == 0 && j == 0) continue;
      if (rng.below(std::uint64_t{3}) == 0) continue;
      const long num = static_cast<long>(rng.below(std::uint64_t{19})) - 9;
      const long den = static_cast<long>(rng.below(std::uint64_t{5})) + 1;
      terms[{i, j}] = Rational(num, den);
    }
  for (auto& [e, c] : terms) c.canonicalize();
  return MultiSeries(kXY, bounds, terms);
}

}  // namespace

TEST_CASE("exp of x has coefficients 1/n!") {
  auto x = MultiSeries::variable({"x"}, {8}, "x");
  auto e = exp(x);
  Rational f = 1;
  for (int n = 0; n <= 8; ++n) {
    if (n > 0) f /= n;
    CHECK(e.coefficient({n}) == f);
  }
  CHECK(e.saturated_in("x"));
}

TEST_CASE("exp rejects a nonzero constant term") {
  auto one = MultiSeries::constant({"x"}, {3}, 1);
  CHECK_THROWS_AS(exp(one), cgs::DomainError);
}

TEST_CASE("coefficient outside the bounds is a range error") {
  auto x = MultiSeries::variable({"x"}, {2}, "x");
  CHECK_THROWS_AS(x.coefficient({3}), cgs::RangeError);
}

TEST_CASE("exp turns sums into products") {
  cgs::Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = random_series(rng, {4, 3}, true);
    auto b = random_series(rng, {4, 3}, true);
    auto lhs = exp(a + b);
    auto rhs = exp(a) * exp(b);
    CHECK(lhs.terms() == rhs.terms());
  }
}

TEST_CASE("multiplication is commutative and distributes over addition") {
  cgs::Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = random_series(rng, {3, 3}, false);
    auto b = random_series(rng, {3, 3}, false);
    auto c = random_series(rng, {3, 3}, false);
    CHECK((a * b).terms() == (b * a).terms());
    CHECK((a * (b + c)).terms() == (a * b + a * c).terms());
  }
}

TEST_CASE("differentiate undoes integrate") {
  cgs::Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = random_series(rng, {5, 2}, false);
    auto back = differentiate(integrate(a, "x"), "x");
    // The top x coefficient of a is lost in integration and flagged.
    auto expected = truncate(a, "x", back.bound("x"));
    CHECK(back.terms() == expected.terms());
  }
}

TEST_CASE("derivative of exp(f) is f' exp(f)") {
  cgs::Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto f = random_series(rng, {4, 2}, true);
    auto lhs = differentiate(exp(f), "x");
    auto rhs = differentiate(f, "x") * exp(f);
    auto bound = std::min(lhs.bound("x"), rhs.bound("x"));
    CHECK(truncate(lhs, "x", bound).terms() == truncate(rhs, "x", bound).terms());
  }
}

TEST_CASE("shift moves exponents and bounds") {
  auto x = MultiSeries::variable(kXY, {2, 2}, "x");
  auto s = shift(x, "y", 2);
  CHECK(s.bound("y") == 4);
  CHECK(s.coefficient({1, 2}) == 1);
  CHECK_THROWS_AS(shift(x, "x", -2), cgs::DomainError);
}

TEST_CASE("embed adds and removes unused variables") {
  auto x = MultiSeries::variable({"x"}, {3}, "x");
  auto e = embed(x, {"w", "x"}, {2, 3});
  CHECK(e.coefficient({0, 1}) == 1);
  auto y = MultiSeries::variable(kXY, {2, 2}, "y");
  CHECK_THROWS_AS(embed(y, {"x"}, {2}), cgs::ConfigurationError);
}

TEST_CASE("substitute composes exactly") {
  // exp(x) with x -> 2y gives exp(2y).
  auto e = exp(MultiSeries::variable({"x"}, {6}, "x"));
  auto two_y = Rational(2) * MultiSeries::variable({"y"}, {6}, "y");
  auto e2 = substitute(e, {{"x", two_y}});
  Rational f = 1;
  for (int n = 0; n <= 6; ++n) {
    if (n > 0) f = f * 2 / n;
    CHECK(e2.coefficient({n}) == f);
  }
  // Terms of exp(x) past x^6 would reach y^7..y^10, so this is not exact.
  auto wide_y = MultiSeries::variable({"y"}, {10}, "y");
  CHECK_THROWS_AS(substitute(e, {{"x", wide_y}}), cgs::DomainError);
  CHECK_THROWS_AS(substitute(e, {{"x", Rational(1)}}), cgs::DomainError);

  auto p = MultiSeries(kXY, {3, 3}, {{{1, 0}, 1}, {{2, 1}, 3}});
  auto q = substitute(p, {{"x", Rational(1, 2)}});
  CHECK(q.variables() == std::vector<std::string>{"y"});
  CHECK(q.coefficient({0}) == Rational(1, 2));
  CHECK(q.coefficient({1}) == Rational(3, 4));

  auto r = substitute(p, {{"x", two_y}});
  CHECK(r.coefficient({1}) == 2);
  CHECK(r.coefficient({3}) == 12);
}

TEST_CASE("evaluate is exact on polynomials and bounds the tail otherwise") {
  auto p = MultiSeries(kXY, {3, 3}, {{{1, 0}, 1}, {{2, 1}, 3}});
  auto v = evaluate(p, {{"x", 0.5}, {"y", 2.0}}, 1e-12);
  CHECK(v.value == doctest::Approx(0.5 + 3 * 0.25 * 2));
  CHECK(v.tail_bound == 0);

  auto e = exp(MultiSeries::variable({"x"}, {30}, "x"));
  auto ev = evaluate(e, {{"x", 1.0}}, 1e-6);
  CHECK(std::abs(ev.value - std::exp(1.0)) <= 1e-12 + ev.tail_bound);
  CHECK(ev.tail_bound < 1e-20);

  auto short_exp = exp(MultiSeries::variable({"x"}, {4}, "x"));
  CHECK_THROWS_AS(evaluate(short_exp, {{"x", 1.0}}, 1e-12), cgs::PrecisionError);
  CHECK_THROWS_AS(evaluate(p, {{"x", 1.0}}, 1e-6), cgs::ConfigurationError);
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(MultiSeries({"x"}, {1, 2}), cgs::ConfigurationError);
  CHECK_THROWS_AS(MultiSeries({"x", "x"}, {1, 2}), cgs::ConfigurationError);
  CHECK_THROWS_AS(MultiSeries({"x"}, {-1}), cgs::ConfigurationError);
}
