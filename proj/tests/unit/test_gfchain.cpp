#include "doctest.h"

#include "cgs/errors.hpp"
#include "cgs/gfchain/brute_force.hpp"
#include "cgs/gfchain/chain.hpp"
#include "cgs/gfchain/float_chain.hpp"
#include "cgs/gfchain/implicit_kernel.hpp"

using namespace cgs::gfchain;

namespace {

mpz_class binom(int n, int k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

// Labelled t-trees on n vertices (n >= t).
mpq_class ttree_count(int t, int n) {
  const int e = n - t - 2;
  mpz_class base = t * (n - t) + 1;
  mpq_class p = 1;
  for (int i = 0; i < std::abs(e); ++i) p *= base;
  if (e < 0) p = 1 / p;
  return binom(n, t) * p;
}

}  // namespace

TEST_CASE("pack and unpack round trip") {
  const std::vector<int> e = {3, 0, 65535, 7};
  CHECK(unpack(pack(e), 4) == e);
}

TEST_CASE("trees: Cayley counts") {
  auto chain = build_chain(1, 1, 30);
  for (int n = 1; n <= 30; ++n) {
    mpz_class expected = 1;
    if (n >= 2) mpz_pow_ui(expected.get_mpz_t(), mpz_class(n).get_mpz_t(), n - 2);
    CHECK(count(chain, n, false) == expected);
    // Rooted at a vertex with n further vertices: (n + 1)^(n - 1).
    mpz_class rooted;
    mpz_pow_ui(rooted.get_mpz_t(), mpz_class(n + 1).get_mpz_t(), n - 1);
    CHECK(count(chain, n, true) == rooted);
  }
}

TEST_CASE("t-trees match the closed form") {
  for (int t = 1; t <= 3; ++t) {
    auto chain = build_chain(t, t, 20);
    for (int n = t; n <= 20; ++n) {
      INFO("t=" << t << " n=" << n);
      CHECK(mpq_class(count(chain, n, false)) == ttree_count(t, n));
    }
  }
}

TEST_CASE("serial and parallel brute force agree") {
  for (int n = 1; n <= 6; ++n) CHECK(brute_force_census_serial(n) == brute_force_census_parallel(n));
}

TEST_CASE("brute force profile of small graphs") {
  SmallGraph k4{4, {0b1110, 0b1101, 0b1011, 0b0111}};
  auto p = profile(k4);
  CHECK(p.chordal);
  CHECK(p.clique_number == 4);
  CHECK(p.connectivity == 4);
  CHECK(p.cliques[3] == 4);
  // Clique number 4 means treewidth 3.
  CHECK(in_class(p, 3, 3));
  CHECK_FALSE(in_class(p, 2, 2));

  SmallGraph c4{4, {0b1010, 0b0101, 0b1010, 0b0101}};
  CHECK_FALSE(profile(c4).chordal);
}

TEST_CASE("chain counts match brute force for small n") {
  const std::vector<std::pair<int, int>> classes = {{1, 1}, {2, 1}, {2, 2}, {3, 1}, {3, 2}};
  for (auto [t, k] : classes) {
    auto chain = build_chain(t, k, 6);
    for (int n = 1; n <= 6; ++n) {
      INFO("t=" << t << " k=" << k << " n=" << n);
      CHECK(count(chain, n, false) == brute_force_class(t, k, n).size());
      if (n + k <= 6) CHECK(count(chain, n, true) == brute_force_rooted_class(t, k, n).size());
    }
  }
}

TEST_CASE("tracked clique sums match brute force") {
  const int n_max = 6;
  for (auto [t, k] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {3, 2}}) {
    ChainOptions opts;
    opts.track_all_cliques = true;
    auto chain = build_chain(t, k, n_max, opts);
    const auto& g = chain.unrooted(k);
    for (int n = 1; n <= n_max; ++n) {
      auto census = brute_force_census_serial(n);
      for (int j = 2; j <= t; ++j) {
        mpq_class sum = 0;
        for (const auto& [e, c] : g.terms())
          if (e[g.index_of("x1")] == n) sum += c * e[g.index_of(var_name(j))];
        mpz_class f;
        mpz_fac_ui(f.get_mpz_t(), n);
        sum *= f;
        INFO("t=" << t << " k=" << k << " n=" << n << " j=" << j);
        CHECK(sum == mpq_class(census.clique_sum(t, k, j)));
      }
    }
  }
}

TEST_CASE("serial and parallel chain solves agree") {
  ChainOptions serial, parallel;
  serial.parallel = false;
  for (auto [t, k] : std::vector<std::pair<int, int>>{{2, 1}, {3, 2}}) {
    auto a = build_chain(t, k, 12, serial);
    auto b = build_chain(t, k, 12, parallel);
    for (int j = k; j <= t; ++j) CHECK(a.rooted(j) == b.rooted(j));
  }
}

TEST_CASE("implicit kernel rejects grade zero terms") {
  ImplicitProblem p;
  p.order = 3;
  p.terms.push_back({0, 0, 0, 1});
  CHECK_THROWS_AS(solve_implicit_serial(p), cgs::ConsistencyError);
}

TEST_CASE("Lagrange extraction matches the solved series") {
  ChainOptions opts;
  opts.component_order = 25;
  auto chain = build_chain(2, 1, 15, opts);
  for (int n = 0; n <= 15; ++n) CHECK(rooted_count_lagrange(chain, n) == count(chain, n, true));
  // Past the solved order the count comes from the component series alone.
  auto longer = build_chain(2, 1, 25);
  for (int n = 16; n <= 25; ++n) CHECK(count(chain, n, true) == count(longer, n, true));
  CHECK_THROWS_AS(count(chain, 26, true), cgs::RangeError);
  CHECK_THROWS_AS(rooted_count_lagrange(build_chain(2, 2, 4), 2), cgs::DomainError);
}

TEST_CASE("decoration counts") {
  // Trees: a decoration with a black children is a star of a edges.
  auto trees = build_chain(1, 1, 8);
  for (int a = 0; a <= 8; ++a) CHECK(decoration_count(trees, a, a) == 1);
  CHECK(decoration_count(trees, 2, 3) == 0);

  // Sum over a of the decoration counts of (2,1) at b white vertices,
  // weighted by the ways to hang rooted graphs, is the rooted count; here
  // only the b = 1 and b = 2 cases are checked by hand. One white vertex:
  // a single edge (one new 1-clique). Two white vertices: a triangle with
  // the root (1 way) or two edges (1 way); both have two new vertices.
  auto chain = build_chain(2, 1, 6);
  CHECK(decoration_count(chain, 1, 1) == 1);
  CHECK(decoration_count(chain, 2, 2) == 2);
  CHECK(decoration_count(chain, 0, 0) == 1);
}

TEST_CASE("float component agrees with the exact series") {
  auto chain = build_chain(2, 1, 20);
  auto exact = float_component_exact(chain, 0.2L);
  auto re = float_component(chain, 20, 0.2L);
  for (const auto& [key, v] : exact.terms) {
    if (key.first > 20) continue;
    auto it = re.terms.find(key);
    REQUIRE(it != re.terms.end());
    CHECK(static_cast<double>(it->second) == doctest::Approx(static_cast<double>(v)).epsilon(1e-12));
  }
}

TEST_CASE("chain validation") {
  CHECK_THROWS_AS(build_chain(2, 3, 4), cgs::ConfigurationError);
  CHECK_THROWS_AS(build_chain(0, 0, 4), cgs::ConfigurationError);
  CHECK_THROWS_AS(build_chain(2, 1, -1), cgs::ConfigurationError);
}
