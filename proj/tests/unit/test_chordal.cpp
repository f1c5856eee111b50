#include "doctest.h"

#include <algorithm>
#include <map>

#include "cgs/chordal/algorithms.hpp"
#include "cgs/chordal/samplers.hpp"
#include "cgs/errors.hpp"
#include "cgs/experiments/stats.hpp"
#include "cgs/gfchain/brute_force.hpp"
#include "shared.hpp"

using namespace cgs;
using namespace cgs::chordal;

namespace {

using EdgeList = std::vector<std::pair<int, int>>;

std::map<EdgeList, std::size_t> index_class(const std::vector<gfchain::SmallGraph>& cls) {
  std::map<EdgeList, std::size_t> idx;
  for (const auto& g : cls) {
    auto e = g.edges();
    std::sort(e.begin(), e.end());
    idx.emplace(e, idx.size());
  }
  return idx;
}

// Chi-square p-value of samples against the uniform law on the class.
template <class Draw>
double uniformity_p(const std::vector<gfchain::SmallGraph>& cls, int samples, Draw draw) {
  const auto idx = index_class(cls);
  std::vector<long long> counts(idx.size());
  for (int i = 0; i < samples; ++i) {
    const ChordalGraph g = draw();
    auto it = idx.find(labelled_edges(g));
    REQUIRE(it != idx.end());
    ++counts[it->second];
  }
  std::vector<double> prob(idx.size(), 1.0 / static_cast<double>(idx.size()));
  return experiments::chi_square(counts, prob).p_value;
}

}  // namespace

TEST_CASE("recognition of small graphs") {
  auto k5 = ChordalGraph::complete(5);
  CHECK(perfect_elimination_order(k5));
  CHECK(clique_count(k5, 3) == 10);
  CHECK(clique_count(k5, 5) == 1);
  CHECK(is_k_connected(k5, 4));
  CHECK_FALSE(is_k_connected(k5, 6));

  auto p = ChordalGraph::path(6);
  CHECK(perfect_elimination_order(p));
  CHECK(diameter(p) == 5);
  CHECK(is_k_connected(p, 1));
  CHECK_FALSE(is_k_connected(p, 2));

  CHECK(perfect_elimination_order(ChordalGraph::cycle(3)));
  for (int n = 4; n <= 7; ++n) {
    auto c = ChordalGraph::cycle(n);
    CHECK_FALSE(perfect_elimination_order(c));
    CHECK_THROWS_AS(clique_count(c, 2), DomainError);
    CHECK_FALSE(verify_member(c, 3, 1).member);
  }
}

TEST_CASE("elimination orders") {
  // Two triangles sharing an edge, plus a pendant vertex.
  auto g = ChordalGraph::from_edges(5, {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}, {3, 4}});
  auto peo = perfect_elimination_order(g);
  REQUIRE(peo);
  CHECK(is_perfect_elimination(g, *peo));
  CHECK(chordal_connectivity(g) == 1);
  auto r = verify_member(g, 2, 1);
  CHECK(r.member);
  CHECK(r.clique_number == 3);
  CHECK_FALSE(verify_member(g, 2, 2).member);
  CHECK_FALSE(verify_member(g, 1, 1).member);
  auto order = mcs(g);
  std::reverse(order.begin(), order.end());
  CHECK(is_perfect_elimination(g, order));
}

TEST_CASE("connectivity agrees between the clique tree and max-flow") {
  for (int n = 3; n <= 6; ++n)
    for (int t = 1; t <= 3; ++t)
      for (int k = 1; k <= t; ++k)
        for (const auto& s : gfchain::brute_force_class(t, k, n)) {
          auto g = ChordalGraph::from_edges(s.n, s.edges());
          REQUIRE(perfect_elimination_order(g));
          const int c = chordal_connectivity(g);
          // Brute force counts K_k as k-connected; the clique tree gives k - 1.
          CHECK(c >= std::min(k, n - 1));
          CHECK(is_k_connected(g, c));
          if (c < n - 1) CHECK_FALSE(is_k_connected(g, c + 1));
        }
}

TEST_CASE("distances and diameter") {
  auto g = ChordalGraph::from_edges(4, {{0, 1}, {1, 2}});
  CHECK(bfs(g, 0) == std::vector<int>{0, 1, 2, -1});
  CHECK_THROWS_AS(diameter(g), DomainError);
  CHECK_THROWS_AS(distances(g, {0}), DomainError);

  const auto& sampler = sampler_2_1();
  Rng rng(9);
  for (int i = 0; i < 30; ++i) {
    auto h = sampler.sample(150, SamplerMode::blowup_rejection, rng);
    CHECK(diameter(h, DiameterMethod::ifub) == diameter(h, DiameterMethod::all_sources));
  }
}

TEST_CASE("decorations at the boundary cases") {
  auto trees = gfchain::build_chain(1, 1, 6);
  Rng rng(1);
  auto bare = sample_decoration(trees, 0, 0, rng);
  CHECK(bare.white == 0);
  CHECK(bare.edges.empty());
  CHECK(bare.black() == 0);

  auto edge = sample_decoration(gfchain::build_chain(2, 1, 6), 1, 1, rng);
  CHECK(edge.edges == EdgeList{{0, 1}});
  CHECK(edge.cliques == std::vector<std::vector<int>>{{1}});

  // A t-tree decoration with one new vertex is forced.
  auto forced = sample_decoration(gfchain::build_chain(2, 2, 6), 2, 1, rng);
  CHECK(forced.edges == EdgeList{{0, 1}, {0, 2}, {1, 2}});
  CHECK(forced.cliques == std::vector<std::vector<int>>{{0, 2}, {1, 2}});

  CHECK_THROWS_AS(sample_decoration(trees, 1, 2, rng), DomainError);
}

TEST_CASE("blow-up of a path-shaped tree") {
  trees::TwoTypeTree t{{1, 1, 0}, {1, 1, 0}};
  Decoration one{1, 1, {{0, 1}}, {{1}}};
  Decoration none{1, 0, {}, {}};
  std::vector<int> whites;
  auto g = blow_up(t, {one, one, none}, nullptr, &whites);
  CHECK(g.n == 3);
  CHECK(g.edges() == EdgeList{{0, 1}, {1, 2}});
  CHECK(whites == std::vector<int>{1, 2});
  CHECK_THROWS_AS(blow_up(t, {one, none, none}), ConsistencyError);
  CHECK_THROWS_AS(blow_up(t, {one, one}), ConsistencyError);
}

TEST_CASE("blow-up samples are members with consistent counts") {
  const GraphSampler trees(1, 1), ktrees(2, 2);
  for (const GraphSampler* s : {&trees, &sampler_2_1(), &ktrees}) {
    const auto& sampler = *s;
    const int t = sampler.t(), k = sampler.k();
    Rng rng(17);
    for (int i = 0; i < 20; ++i) {
      auto c = sampler.sample_coupled(120, rng);
      INFO("t=" << t << " k=" << k);
      CHECK(c.graph.n == k + c.tree.white_count());
      CHECK(verify_member(c.graph, t, k).member);
      // Black vertices are exactly the k-cliques of the graph.
      CHECK(clique_count(c.graph, k) == c.tree.black_count());
      CHECK(static_cast<long long>(c.white_vertex.size()) == c.tree.white_count());
      auto labels = *c.graph.labels;
      std::sort(labels.begin() + k, labels.end());
      for (int v = k; v < c.graph.n; ++v) CHECK(labels[v] == v - k + 1);
    }
  }
}

TEST_CASE("exact rooted sampler is uniform") {
  for (auto [t, k, n] : std::vector<std::tuple<int, int, int>>{{2, 1, 3}, {2, 2, 3}, {3, 2, 3}}) {
    GraphSampler sampler(t, k, {.chain_order = 8});
    Rng rng(100 + t * 10 + k);
    const double p = uniformity_p(gfchain::brute_force_rooted_class(t, k, n), 20000,
                                  [&] { return sampler.sample(n, SamplerMode::recursive_exact, rng); });
    INFO("t=" << t << " k=" << k << " n=" << n);
    CHECK(p > 0.001);
  }
}

TEST_CASE("blow-up sampler is uniform") {
  GraphSampler sampler(1, 1);
  Rng rng(5);
  const double p = uniformity_p(gfchain::brute_force_rooted_class(1, 1, 4), 20000,
                                [&] { return sampler.sample(4, SamplerMode::blowup_rejection, rng); });
  CHECK(p > 0.001);
}

TEST_CASE("reweighting de-rooter is uniform over unrooted graphs") {
  GraphSampler sampler(2, 1, {.chain_order = 8});
  Rng rng(6);
  const double p = uniformity_p(gfchain::brute_force_class(2, 1, 4), 20000, [&] {
    return sample_unrooted(sampler, 4, SamplerMode::recursive_exact, DerootMode::reweight, rng);
  });
  CHECK(p > 0.001);
}

TEST_CASE("de-rooting") {
  const auto& sampler = sampler_2_1();
  Rng rng(8);
  for (int i = 0; i < 20; ++i) {
    auto g = sampler.sample(60, SamplerMode::blowup_rejection, rng);
    const double a = deroot_acceptance(g);
    CHECK(a > 0);
    CHECK(a <= 1);
    auto f = deroot(g, DerootMode::forget, rng);
    REQUIRE(f);
    CHECK(f->edges() == g.edges());
    CHECK_FALSE(f->root_clique);
    CHECK_FALSE(f->labels);
  }
  // k-trees have exactly k(N - k) + 1 k-cliques, so nothing is rejected.
  GraphSampler ktrees(2, 2);
  for (int i = 0; i < 5; ++i)
    CHECK(deroot_acceptance(ktrees.sample(50, SamplerMode::blowup_rejection, rng)) == 1.0);
  ChordalGraph plain = ChordalGraph::path(3);
  CHECK_THROWS_AS(deroot_acceptance(plain), DomainError);
}

TEST_CASE("json round trip") {
  const auto& sampler = sampler_2_1();
  Rng rng(4);
  auto g = sampler.sample(30, SamplerMode::blowup_rejection, rng);
  auto back = from_json(to_json(g, 4));
  CHECK(back.edges() == g.edges());
  CHECK(back.root_clique == g.root_clique);
  CHECK(back.labels == g.labels);
  CHECK(to_dot(ChordalGraph::path(2)).find("0 -- 1") != std::string::npos);
}

TEST_CASE("same seed gives the same graph") {
  const auto& sampler = sampler_2_1();
  Rng a(77), b(77);
  CHECK(sampler.sample(200, SamplerMode::blowup_rejection, a).edges() ==
        sampler.sample(200, SamplerMode::blowup_rejection, b).edges());
  CHECK_THROWS_AS(sampler.sample(1000, SamplerMode::recursive_exact, a), RangeError);
}
