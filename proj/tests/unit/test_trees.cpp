#include "doctest.h"

#include <cmath>
#include <map>

#include "cgs/errors.hpp"
#include "cgs/trees/sampling.hpp"
#include "cgs/trees/tree.hpp"

using namespace cgs;
using namespace cgs::trees;

namespace {

// Black root with two black children; the first has one white child, the
// root has two white children.
TwoTypeTree small_tree() { return {{2, 0, 0}, {2, 1, 0}}; }

OffspringLaw poisson_law(int cutoff) {
  OffspringLaw law;
  law.cutoff = cutoff;
  double f = 1, total = 0;
  for (int a = 0; a <= cutoff; ++a) {
    if (a > 0) f *= a;
    law.entries.push_back({a, a, std::exp(-1.0) / f});
    total += std::exp(-1.0) / f;
  }
  law.deficit = 1 - total;
  return law;
}

// A law without the black = c * white structure.
OffspringLaw mixed_law() {
  OffspringLaw law;
  law.cutoff = 2;
  law.entries = {{0, 1, 0.3}, {1, 0, 0.2}, {1, 1, 0.2}, {2, 1, 0.3}};
  return law;
}

}  // namespace

TEST_CASE("preorder encoding and index") {
  auto t = small_tree();
  CHECK(t.valid());
  CHECK(t.white_count() == 3);
  TreeIndex idx(t);
  CHECK(idx.parent == std::vector<int>{-1, 0, 0});
  CHECK(idx.depth == std::vector<int>{0, 1, 1});
  CHECK(idx.end == std::vector<int>{3, 2, 3});
  CHECK(idx.children(0) == std::vector<int>{1, 2});
  CHECK(idx.first_white == std::vector<long long>{0, 2, 3});
  CHECK(height(t) == 2);

  CHECK_FALSE(TwoTypeTree{{1}, {0}}.valid());
  CHECK_FALSE(TwoTypeTree{{0, 0}, {0, 0}}.valid());
  CHECK_FALSE(TwoTypeTree{}.valid());
  CHECK(TwoTypeTree::single_root().valid());
}

TEST_CASE("fringes of a marked tree") {
  MarkedTree m{small_tree(), 1, 0, {}};
  CHECK(m.mark_height() == 2);
  CHECK(fringe(m, 0)->is_lone_white());
  auto f1 = fringe(m, 1);
  REQUIRE(f1);
  CHECK(f1->tree == TwoTypeTree{{0}, {1}});
  CHECK(f1->key() == "0,1;|0.0");
  auto f2 = fringe(m, 2);
  REQUIRE(f2);
  CHECK(*f2 == m);
  CHECK_FALSE(fringe(m, 3));
  CHECK(MarkedTree::lone_white().key() == "*");
}

TEST_CASE("fringe census accounts for every white vertex") {
  auto t = small_tree();
  for (int h = 0; h <= 3; ++h)
    for (int max_black = 1; max_black <= 3; ++max_black) {
      auto c = fringe_census(t, h, max_black);
      long long total = c.other + c.undefined;
      for (const auto& [key, n] : c.counts) total += n;
      CHECK(total == t.white_count());
    }
  auto c = fringe_census(t, 1, 1);
  CHECK(c.counts.at("0,1;|0.0") == 1);
  CHECK(c.other == 2);
}

TEST_CASE("fringe probabilities at height one increase towards one") {
  // Poisson(1): the only marked tree with two black vertices is a root with
  // one black and one white child over a leaf, probability e^-2.
  auto law = poisson_law(30);
  auto sum = [&](int max_black) {
    double s = 0;
    for (const auto& tau : enumerate_fringes(law, 1, max_black)) s += fringe_probability(law, tau);
    return s;
  };
  CHECK(sum(1) == 0);
  CHECK(sum(2) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  double last = 0;
  for (int m = 3; m <= 9; ++m) {
    const double s = sum(m);
    CHECK(s > last);
    CHECK(s <= 1 + 1e-12);
    last = s;
  }
  CHECK(fringe_probability(law, MarkedTree::lone_white()) == 1);
  CHECK_THROWS_AS(fringe_probability(law, MarkedTree{small_tree(), 2, 0, {}}), DomainError);
}

TEST_CASE("degree profile") {
  auto p = degree_profile(small_tree(), 0.5);
  CHECK(p.black_degree.at(0) == 2);
  CHECK(p.black_degree.at(2) == 1);
  CHECK(p.max_black_degree == 2);
  CHECK(p.max_white_degree == 2);
  CHECK(p.position == 2);
  CHECK(p.parent_position == 1);
  CHECK(degree_profile(small_tree(), 1.0).parent_position == 2);
}

TEST_CASE("alias sampler reproduces the law") {
  auto law = mixed_law();
  OffspringSampler s(law);
  CHECK(s.ratio() == -1);
  Rng rng(1);
  std::map<std::pair<int, int>, int> seen;
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) ++seen[s(rng)];
  for (const auto& e : law.entries) {
    const double f = seen[{e.black, e.white}] / static_cast<double>(draws);
    CHECK(std::abs(f - e.p) < 5 * std::sqrt(e.p * (1 - e.p) / draws));
  }
}

TEST_CASE("conditioned trees have the requested size") {
  Rng rng(2);
  OffspringSampler poisson(poisson_law(30));
  OffspringSampler mixed(mixed_law());
  for (long long n : {1, 5, 40}) {
    auto a = sample_conditioned(poisson, n, rng, 1000000);
    CHECK(a.valid());
    CHECK(a.white_count() == n);
    auto b = sample_conditioned(mixed, n, rng, 1000000);
    CHECK(b.valid());
    CHECK(b.white_count() == n);
  }
  auto p = sample_poisson_conditioned(2, 30, rng);
  CHECK(p.valid());
  CHECK(p.white_count() == 30);
  for (int v = 0; v < p.black_count(); ++v) CHECK(p.black[v] == 2 * p.white[v]);
}

TEST_CASE("conditioning methods agree in distribution") {
  // Both methods target the same conditional law; compare the tree shapes
  // at n = 3 by total variation.
  OffspringSampler poisson(poisson_law(30));
  const int draws = 40000;
  std::map<std::string, double> fast, slow;
  Rng rng(3);
  for (int i = 0; i < draws; ++i) {
    auto a = sample_conditioned(poisson, 3, rng, 1000000, ConditionMethod::automatic);
    auto b = sample_conditioned(poisson, 3, rng, 1000000, ConditionMethod::rejection);
    fast[MarkedTree{a, 0, 0, {}}.key()] += 1.0 / draws;
    slow[MarkedTree{b, 0, 0, {}}.key()] += 1.0 / draws;
  }
  double tv = 0;
  for (const auto& [k, p] : fast) tv += std::abs(p - (slow.count(k) ? slow[k] : 0));
  for (const auto& [k, p] : slow)
    if (!fast.count(k)) tv += p;
  CHECK(tv / 2 < 0.02);
}

TEST_CASE("unconditioned tree respects the node cap") {
  OffspringLaw law;
  law.cutoff = 2;
  law.entries = {{2, 0, 1.0}};  // never terminates
  OffspringSampler s(law);
  Rng rng(4);
  CHECK_THROWS_AS(sample_bgw(s, rng, 1000), OverflowError);
}

TEST_CASE("spine construction") {
  SpineLaws laws(poisson_law(30));
  Rng rng(5);
  for (int ell : {0, 1, 5}) {
    auto m = sample_spine(laws, ell, rng, 1000000);
    CHECK(m.tree.valid());
    CHECK(m.mark_height() == ell + 1);
    CHECK(static_cast<int>(m.spine.size()) == ell + 1);
    CHECK(m.spine.back() == m.mark_parent);
    auto path = sample_spine_path(laws, ell, rng);
    CHECK(static_cast<int>(path.size()) == ell + 1);
    for (int i = 0; i < ell; ++i) CHECK(path[i].next < path[i].black);
    CHECK(path[ell].next < path[ell].white);
  }
}
