#include <algorithm>
#include <deque>
#include <limits>

#include "cgs/chordal/algorithms.hpp"
#include "cgs/errors.hpp"

namespace cgs::chordal {

std::vector<int> lex_bfs(const ChordalGraph& g) {
  // Partition refinement over an array: cells are contiguous ranges of
  // `seq` in decreasing label order, so the next vertex is always seq[i].
  const int n = g.n;
  std::vector<int> seq(n), pos(n), cell(n, 0);
  std::vector<int> start{0}, stop{n}, stamp{-1}, fresh{-1};
  for (int v = 0; v < n; ++v) seq[v] = pos[v] = v;
  for (int i = 0; i < n; ++i) {
    const int v = seq[i];
    ++start[cell[v]];
    for (int w : g.adj[v]) {
      if (pos[w] <= i) continue;
      const int c = cell[w];
      if (stamp[c] != i) {
        // Neighbours of v move into a new cell just in front of c.
        stamp[c] = i;
        fresh[c] = static_cast<int>(start.size());
        start.push_back(start[c]);
        stop.push_back(start[c]);
        stamp.push_back(-1);
        fresh.push_back(-1);
      }
      const int f = fresh[c];
      const int displaced = seq[start[c]];
      std::swap(seq[pos[w]], seq[start[c]]);
      std::swap(pos[w], pos[displaced]);
      ++start[c];
      ++stop[f];
      cell[w] = f;
    }
  }
  return seq;
}

std::vector<int> mcs(const ChordalGraph& g) {
  const int n = g.n;
  std::vector<int> weight(n, 0), order;
  std::vector<char> done(n, 0);
  std::vector<std::vector<int>> bucket(n + 1);
  for (int v = n - 1; v >= 0; --v) bucket[0].push_back(v);
  int top = 0;
  order.reserve(n);
  while (static_cast<int>(order.size()) < n) {
    while (top >= 0 && bucket[top].empty()) --top;
    const int v = bucket[top].back();
    bucket[top].pop_back();
    if (done[v] || weight[v] != top) continue;
    done[v] = 1;
    order.push_back(v);
    for (int w : g.adj[v]) {
      if (done[w]) continue;
      bucket[++weight[w]].push_back(w);
      top = std::max(top, weight[w]);
    }
  }
  return order;
}

bool is_perfect_elimination(const ChordalGraph& g, const std::vector<int>& order) {
  const int n = g.n;
  if (static_cast<int>(order.size()) != n) return false;
  std::vector<int> pos(n, -1);
  for (int i = 0; i < n; ++i) {
    if (order[i] < 0 || order[i] >= n || pos[order[i]] >= 0) return false;
    pos[order[i]] = i;
  }
  for (int v : order) {
    // The earliest later neighbour must see all other later neighbours.
    int parent = -1;
    for (int w : g.adj[v])
      if (pos[w] > pos[v] && (parent < 0 || pos[w] < pos[parent])) parent = w;
    if (parent < 0) continue;
    for (int w : g.adj[v])
      if (pos[w] > pos[v] && w != parent && !g.has_edge(parent, w)) return false;
  }
  return true;
}

std::optional<std::vector<int>> perfect_elimination_order(const ChordalGraph& g) {
  std::vector<int> order = lex_bfs(g);
  std::reverse(order.begin(), order.end());
  if (!is_perfect_elimination(g, order)) return std::nullopt;
  return order;
}

namespace {

std::vector<int> positions(const std::vector<int>& order) {
  std::vector<int> pos(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<int>(i);
  return pos;
}

std::vector<int> later_neighbours(const ChordalGraph& g, const std::vector<int>& pos, int v) {
  std::vector<int> out;
  for (int w : g.adj[v])
    if (pos[w] > pos[v]) out.push_back(w);
  return out;
}

// Elimination order for a graph already known or assumed chordal.
std::vector<int> fast_peo(const ChordalGraph& g) {
  std::vector<int> order = mcs(g);
  std::reverse(order.begin(), order.end());
  return order;
}

long long binom_ll(long long n, long long r) {
  if (r < 0 || r > n) return 0;
  long long out = 1;
  for (long long i = 1; i <= r; ++i) out = out * (n - r + i) / i;
  return out;
}

}  // namespace

bool is_connected(const ChordalGraph& g) {
  if (g.n == 0) return true;
  const auto d = bfs(g, 0);
  return std::find(d.begin(), d.end(), -1) == d.end();
}

int chordal_connectivity(const ChordalGraph& g) {
  const int n = g.n;
  if (n <= 1 || !is_connected(g)) return 0;
  // Along a maximum cardinality search a new maximal clique starts whenever
  // the count of visited neighbours fails to grow; those neighbours are a
  // minimal separator, and every minimal separator shows up this way.
  const auto order = mcs(g);
  std::vector<char> seen(n, 0);
  int best = n - 1, prev = -1;
  for (int i = 0; i < n; ++i) {
    const int v = order[i];
    int visited = 0;
    for (int w : g.adj[v]) visited += seen[w];
    if (i > 0 && visited <= prev) best = std::min(best, visited);
    prev = visited;
    seen[v] = 1;
  }
  return best;
}

namespace {

// Unit vertex capacities via vertex splitting: node 2v is v's entry, 2v+1
// its exit.
class FlowNetwork {
 public:
  explicit FlowNetwork(const ChordalGraph& g) : nodes_(2 * g.n) {
    head_.assign(nodes_, -1);
    for (int v = 0; v < g.n; ++v) split_.push_back(add(2 * v, 2 * v + 1, 1));
    for (int u = 0; u < g.n; ++u)
      for (int v : g.adj[u]) add(2 * u + 1, 2 * v, kBig);
    base_ = cap_;
  }

  // Number of internally vertex-disjoint s-t paths, stopping at limit.
  int paths(int s, int t, int limit) {
    cap_ = base_;
    cap_[split_[s]] = kBig;
    cap_[split_[t]] = kBig;
    const int src = 2 * s, dst = 2 * t + 1;
    int flow = 0;
    std::vector<int> via(nodes_);
    while (flow < limit) {
      std::fill(via.begin(), via.end(), -1);
      std::deque<int> q{src};
      via[src] = -2;
      while (!q.empty() && via[dst] == -1) {
        const int x = q.front();
        q.pop_front();
        for (int e = head_[x]; e >= 0; e = next_[e])
          if (cap_[e] > 0 && via[to_[e]] == -1) {
            via[to_[e]] = e;
            q.push_back(to_[e]);
          }
      }
      if (via[dst] == -1) break;
      for (int x = dst; x != src; x = to_[via[x] ^ 1]) {
        --cap_[via[x]];
        ++cap_[via[x] ^ 1];
      }
      ++flow;
    }
    return flow;
  }

 private:
  static constexpr int kBig = std::numeric_limits<int>::max() / 4;

  int add(int a, int b, int c) {
    const int e = static_cast<int>(to_.size());
    to_.push_back(b);
    cap_.push_back(c);
    next_.push_back(head_[a]);
    head_[a] = e;
    to_.push_back(a);
    cap_.push_back(0);
    next_.push_back(head_[b]);
    head_[b] = e + 1;
    return e;
  }

  int nodes_;
  std::vector<int> head_, next_, to_, cap_, base_, split_;
};

}  // namespace

bool is_k_connected(const ChordalGraph& g, int k) {
  if (k <= 0) return true;
  if (g.n < k) return false;
  if (g.edge_count() == static_cast<long long>(g.n) * (g.n - 1) / 2) return true;
  if (!is_connected(g)) return false;
  if (k == 1) return true;
  FlowNetwork net(g);
  for (int i = 0; i < k && i < g.n; ++i)
    for (int j = i + 1; j < g.n; ++j)
      if (!g.has_edge(i, j) && net.paths(i, j, k) < k) return false;
  return true;
}

MemberReport verify_member(const ChordalGraph& g, int t, int k) {
  MemberReport r;
  const auto peo = perfect_elimination_order(g);
  r.chordal = peo.has_value();
  if (r.chordal) {
    const auto pos = positions(*peo);
    for (int v = 0; v < g.n; ++v) {
      int later = 0;
      for (int w : g.adj[v]) later += pos[w] > pos[v];
      r.clique_number = std::max(r.clique_number, later + 1);
    }
    r.connectivity = chordal_connectivity(g);
  }
  r.k_connected = is_k_connected(g, k);
  if (g.root_clique) {
    const auto& c = *g.root_clique;
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j)
        r.root_is_clique = r.root_is_clique && g.has_edge(c[i], c[j]);
  }
  r.member = r.chordal && r.clique_number <= t + 1 && r.k_connected && r.root_is_clique;
  return r;
}

long long clique_count(const ChordalGraph& g, int j) {
  if (j <= 0) return j == 0 ? 1 : 0;
  const auto peo = fast_peo(g);
  if (!is_perfect_elimination(g, peo)) throw DomainError("clique count needs a chordal graph");
  const auto pos = positions(peo);
  long long total = 0;
  for (int v = 0; v < g.n; ++v) {
    long long later = 0;
    for (int w : g.adj[v]) later += pos[w] > pos[v];
    total += binom_ll(later, j - 1);
  }
  return total;
}

std::vector<std::vector<int>> cliques(const ChordalGraph& g, int j) {
  std::vector<std::vector<int>> out;
  if (j <= 0) return out;
  const auto peo = fast_peo(g);
  if (!is_perfect_elimination(g, peo)) throw DomainError("clique listing needs a chordal graph");
  const auto pos = positions(peo);
  for (int v = 0; v < g.n; ++v) {
    const auto later = later_neighbours(g, pos, v);
    const int r = j - 1;
    if (r > static_cast<int>(later.size())) continue;
    std::vector<int> pick(r);
    for (int i = 0; i < r; ++i) pick[i] = i;
    for (;;) {
      std::vector<int> c{v};
      for (int i : pick) c.push_back(later[i]);
      std::sort(c.begin(), c.end());
      out.push_back(std::move(c));
      int i = r - 1;
      while (i >= 0 && pick[i] == static_cast<int>(later.size()) - r + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int m = i + 1; m < r; ++m) pick[m] = pick[m - 1] + 1;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> bfs(const ChordalGraph& g, int source) {
  std::vector<int> d(g.n, -1);
  std::vector<int> q;
  q.reserve(g.n);
  d[source] = 0;
  q.push_back(source);
  for (std::size_t i = 0; i < q.size(); ++i) {
    const int v = q[i];
    for (int w : g.adj[v])
      if (d[w] < 0) {
        d[w] = d[v] + 1;
        q.push_back(w);
      }
  }
  return d;
}

std::vector<std::vector<int>> distances(const ChordalGraph& g, const std::vector<int>& sources) {
  if (!is_connected(g)) throw DomainError("distances need a connected graph");
  std::vector<std::vector<int>> out;
  for (int s : sources) out.push_back(bfs(g, s));
  return out;
}

int diameter(const ChordalGraph& g, DiameterMethod method) {
  if (g.n <= 1) return 0;
  auto ecc = [&](int v, std::vector<int>* dist = nullptr) {
    auto d = bfs(g, v);
    int e = 0;
    for (int x : d) {
      if (x < 0) throw DomainError("diameter needs a connected graph");
      e = std::max(e, x);
    }
    if (dist) *dist = std::move(d);
    return e;
  };
  if (method == DiameterMethod::all_sources) {
    int best = 0;
    for (int v = 0; v < g.n; ++v) best = std::max(best, ecc(v));
    return best;
  }
  std::vector<int> d0, da;
  ecc(0, &d0);
  const int a = static_cast<int>(std::max_element(d0.begin(), d0.end()) - d0.begin());
  int lb = ecc(a, &da);
  const int b = static_cast<int>(std::max_element(da.begin(), da.end()) - da.begin());
  // Middle of the a-b geodesic.
  int u = b;
  for (int steps = da[b] / 2; steps > 0; --steps)
    for (int w : g.adj[u])
      if (da[w] == da[u] - 1) {
        u = w;
        break;
      }
  std::vector<int> du;
  const int eu = ecc(u, &du);
  std::vector<std::vector<int>> levels(eu + 1);
  for (int v = 0; v < g.n; ++v) levels[du[v]].push_back(v);
  lb = std::max(lb, eu);
  int ub = 2 * eu;
  for (int i = eu; ub > lb && i > 0; --i) {
    int bi = 0;
    for (int v : levels[i]) bi = std::max(bi, ecc(v));
    lb = std::max(lb, bi);
    if (lb > 2 * (i - 1)) return lb;
    ub = 2 * (i - 1);
  }
  return lb;
}

}  // namespace cgs::chordal
