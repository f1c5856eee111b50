#include "cgs/gfchain/brute_force.hpp"

#include <bit>

#include <omp.h>

#include "cgs/errors.hpp"

namespace cgs::gfchain {

namespace {

constexpr int kMaxVertices = 8;

std::uint64_t choose(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

bool connected_within(const SmallGraph& g, std::uint32_t alive) {
  if (alive == 0) return true;
  std::uint32_t seen = alive & (~alive + 1);
  std::uint32_t frontier = seen;
  while (frontier) {
    const int v = std::countr_zero(frontier);
    frontier &= frontier - 1;
    const std::uint32_t next = g.adj[v] & alive & ~seen;
    seen |= next;
    frontier |= next;
  }
  return seen == alive;
}

SmallGraph from_mask(int n, std::uint64_t mask) {
  SmallGraph g;
  g.n = n;
  g.adj.assign(n, 0);
  int bit = 0;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v, ++bit)
      if ((mask >> bit) & 1u) {
        g.adj[u] |= static_cast<std::uint16_t>(1u << v);
        g.adj[v] |= static_cast<std::uint16_t>(1u << u);
      }
  return g;
}

void tally(Census& c, const SmallGraphProfile& p) {
  auto& cell = c.cells[{p.clique_number, p.connectivity}];
  if (cell.clique_sums.empty()) cell.clique_sums.assign(c.n + 1, 0);
  cell.graphs += 1;
  for (int j = 0; j <= c.n; ++j) cell.clique_sums[j] += p.cliques[j];
}

void merge(Census& into, const Census& from) {
  for (const auto& [key, cell] : from.cells) {
    auto& dst = into.cells[key];
    if (dst.clique_sums.empty()) dst.clique_sums.assign(into.n + 1, 0);
    dst.graphs += cell.graphs;
    for (int j = 0; j <= into.n; ++j) dst.clique_sums[j] += cell.clique_sums[j];
  }
}

void check_size(int n) {
  if (n < 1 || n > kMaxVertices)
    throw RangeError("brute force supports 1..8 vertices, got " + std::to_string(n));
}

}  // namespace

std::vector<std::pair<int, int>> SmallGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (has_edge(u, v)) out.emplace_back(u, v);
  return out;
}

SmallGraphProfile profile(const SmallGraph& g) {
  SmallGraphProfile p;
  const int n = g.n;
  const std::uint32_t all = (1u << n) - 1;
  p.connected = connected_within(g, all);
  if (!p.connected) return p;

  // Simplicial elimination; also yields clique counts.
  p.cliques.assign(n + 1, 0);
  std::uint32_t alive = all;
  p.chordal = true;
  for (int step = 0; step < n && p.chordal; ++step) {
    int pick = -1;
    for (std::uint32_t rest = alive; rest; rest &= rest - 1) {
      const int v = std::countr_zero(rest);
      const std::uint32_t nb = g.adj[v] & alive;
      bool clique = true;
      for (std::uint32_t r = nb; r && clique; r &= r - 1) {
        const int u = std::countr_zero(r);
        if ((nb & ~(1u << u) & ~static_cast<std::uint32_t>(g.adj[u])) != 0) clique = false;
      }
      if (clique) {
        pick = v;
        break;
      }
    }
    if (pick < 0) {
      p.chordal = false;
      break;
    }
    const int d = std::popcount(static_cast<std::uint32_t>(g.adj[pick] & alive));
    p.clique_number = std::max(p.clique_number, d + 1);
    for (int j = 1; j <= d + 1; ++j) p.cliques[j] += choose(d, j - 1);
    alive &= ~(1u << pick);
  }
  if (!p.chordal) {
    p.cliques.clear();
    p.clique_number = 0;
    return p;
  }

  bool complete = true;
  for (int v = 0; v < n; ++v)
    if ((g.adj[v] | (1u << v)) != all) complete = false;
  if (complete) {
    p.connectivity = n;
    return p;
  }
  for (int s = 1; s < n - 1; ++s) {
    for (std::uint32_t cut = 0; cut <= all; ++cut) {
      if (std::popcount(cut) != s) continue;
      if (!connected_within(g, all & ~cut)) {
        p.connectivity = s;
        return p;
      }
    }
  }
  p.connectivity = n - 1;
  return p;
}

bool in_class(const SmallGraphProfile& p, int t, int k) {
  return p.connected && p.chordal && p.clique_number <= t + 1 && p.connectivity >= k;
}

std::uint64_t Census::count(int t, int k) const {
  std::uint64_t s = 0;
  for (const auto& [key, cell] : cells)
    if (key.first <= t + 1 && key.second >= k) s += cell.graphs;
  return s;
}

std::uint64_t Census::clique_sum(int t, int k, int j) const {
  std::uint64_t s = 0;
  if (j < 0 || j > n) return 0;
  for (const auto& [key, cell] : cells)
    if (key.first <= t + 1 && key.second >= k) s += cell.clique_sums[j];
  return s;
}

bool Census::operator==(const Census& other) const {
  if (n != other.n || cells.size() != other.cells.size()) return false;
  for (const auto& [key, cell] : cells) {
    auto it = other.cells.find(key);
    if (it == other.cells.end() || it->second.graphs != cell.graphs ||
        it->second.clique_sums != cell.clique_sums)
      return false;
  }
  return true;
}

Census brute_force_census_serial(int n) {
  check_size(n);
  Census c;
  c.n = n;
  const std::uint64_t total = std::uint64_t{1} << (n * (n - 1) / 2);
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    const auto p = profile(from_mask(n, mask));
    if (p.connected && p.chordal) tally(c, p);
  }
  return c;
}

Census brute_force_census_parallel(int n) {
  check_size(n);
  Census c;
  c.n = n;
  const std::int64_t total = std::int64_t{1} << (n * (n - 1) / 2);
#pragma omp parallel
  {
    Census local;
    local.n = n;
#pragma omp for schedule(static)
    for (std::int64_t mask = 0; mask < total; ++mask) {
      const auto p = profile(from_mask(n, static_cast<std::uint64_t>(mask)));
      if (p.connected && p.chordal) tally(local, p);
    }
#pragma omp critical
    merge(c, local);
  }
  return c;
}

std::vector<SmallGraph> brute_force_class(int t, int k, int n) {
  check_size(n);
  std::vector<SmallGraph> out;
  const std::uint64_t total = std::uint64_t{1} << (n * (n - 1) / 2);
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    SmallGraph g = from_mask(n, mask);
    if (in_class(profile(g), t, k)) out.push_back(std::move(g));
  }
  return out;
}

std::vector<SmallGraph> brute_force_rooted_class(int t, int k, int n) {
  if (n < 0) throw RangeError("negative size");
  const int total_vertices = n + k;
  check_size(total_vertices);
  std::vector<SmallGraph> out;
  const int bits = total_vertices * (total_vertices - 1) / 2;
  // Bits of the root clique edges are forced on.
  std::uint64_t forced = 0;
  int bit = 0;
  for (int u = 0; u < total_vertices; ++u)
    for (int v = u + 1; v < total_vertices; ++v, ++bit)
      if (v < k) forced |= std::uint64_t{1} << bit;
  const std::uint64_t total = std::uint64_t{1} << bits;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    if ((mask & forced) != forced) continue;
    SmallGraph g = from_mask(total_vertices, mask);
    if (in_class(profile(g), t, k)) out.push_back(std::move(g));
  }
  return out;
}

}  // namespace cgs::gfchain
