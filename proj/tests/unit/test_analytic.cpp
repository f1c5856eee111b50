#include "doctest.h"

#include <cmath>

#include "cgs/analytic/analytic.hpp"
#include "cgs/analytic/numeric_component.hpp"
#include "cgs/errors.hpp"
#include "cgs/gfchain/float_chain.hpp"
#include "shared.hpp"

using namespace cgs;
using namespace cgs::analytic;

TEST_CASE("trees: singularity at 1/e and Poisson offspring") {
  auto chain = gfchain::build_chain(1, 1, 30);
  auto s = find_singularity(chain, 1e-10);
  CHECK(std::abs(s.rho - std::exp(-1.0)) < 1e-9);
  CHECK(std::abs(s.y - std::exp(1.0)) < 1e-6);
  auto law = offspring_law(chain, s);
  double fact = 1;
  for (int a = 0; a <= 12; ++a) {
    if (a > 0) fact *= a;
    CHECK(std::abs(law(a, a) - std::exp(-1.0) / fact) < 1e-12);
    if (a > 0) CHECK(law(a, a - 1) == 0);
  }
  CHECK(std::abs(law.mean_black() - 1) < 1e-10);
  CHECK(std::abs(law.var_black() - 1) < 1e-9);
  CHECK(law.deficit < kDefaultDeficit);
}

TEST_CASE("offspring law is critical") {
  auto check = [](const OffspringLaw& law) {
    // The truncated mean misses about cutoff * deficit.
    CHECK(std::abs(law.mean_black() - 1) < 1e-8 + law.cutoff * law.deficit);
    CHECK(std::abs(law.total() + law.deficit - 1) < 1e-12);
    for (const auto& e : law.entries) CHECK(e.p > 0);
  };
  check(sampler_2_1().law());
  auto chain = gfchain::build_chain(2, 2, 40);
  check(offspring_law(chain, find_singularity(chain, 1e-9)));
}

TEST_CASE("singularity solves the fixed point equation") {
  const auto& s = sampler_2_1().singularity();
  NumericComponent h(*s.component);
  const double x = s.rho;
  // At the critical point y = exp(H) and y H_y = 1.
  auto v = h.at(x, s.y);
  CHECK(std::abs(std::exp(v.h) - s.y) < 1e-6);
  CHECK(std::abs(s.y * v.h_y - 1) < 1e-6);
  CHECK(h.has_fixed_point(x * (1 - 1e-6), 0, 0));
  CHECK_FALSE(h.has_fixed_point(x * (1 + 1e-3), 0, 0));
}

TEST_CASE("2-trees have a polynomial component and a known singularity") {
  // Rooted 2-trees at an edge: Y = exp(x Y^2), so rho = 1/(2e) and y = sqrt(e).
  auto chain = gfchain::build_chain(2, 2, 20);
  auto s = find_singularity(chain, 1e-10);
  CHECK(std::abs(s.rho - 1 / (2 * std::exp(1.0))) < 1e-9);
  CHECK(std::abs(s.y - std::sqrt(std::exp(1.0))) < 1e-6);
}

TEST_CASE("size-biased laws") {
  const auto& law = sampler_2_1().law();
  auto by_black = biased_by_black(law);
  auto by_white = biased_by_white(law);
  CHECK(by_black.total() == doctest::Approx(law.mean_black()).epsilon(1e-12));
  CHECK(by_white.total() == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& e : by_black.entries) CHECK(e.p == doctest::Approx(e.black * law(e.black, e.white)));
}

TEST_CASE("tree constants are consistent with the law") {
  auto chain = gfchain::build_chain(1, 1, 30);
  auto s = find_singularity(chain, 1e-10);
  auto law = offspring_law(chain, s);
  auto c = tree_constants(chain, s, law);
  CHECK(c.mean_black == doctest::Approx(1.0));
  CHECK(c.kappa_tree == doctest::Approx(std::sqrt(c.var_black * c.mean_white) / 2));
  // Poisson(1) Galton-Watson total progeny: P(n) ~ n^{-3/2} / sqrt(2 pi).
  CHECK(std::abs(c.size_prob_constant - 1 / std::sqrt(2 * M_PI)) <= c.size_prob_constant_err);
}

TEST_CASE("size probability of small trees") {
  // With Poisson(1) offspring the unconditioned tree has n white vertices
  // (n + 1 black) with probability (n + 1)^(n - 1) e^-(n + 1) / n!.
  auto chain = gfchain::build_chain(1, 1, 30);
  auto s = find_singularity(chain, 1e-10);
  double fact = 1;
  for (int n = 0; n <= 10; ++n) {
    if (n > 0) fact *= n;
    const double expected = std::pow(n + 1.0, n - 1.0) * std::exp(-(n + 1.0)) / fact;
    CHECK(size_probability(chain, s, n) == doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("a short cutoff leaves too much mass outside the table") {
  const auto& sampler = sampler_2_1();
  CHECK_THROWS_AS(offspring_law(sampler.chain(), sampler.singularity(), 3, 1e-12), RangeError);
}
