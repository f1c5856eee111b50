#include <algorithm>
#include <sstream>

#include "cgs/chordal/graph.hpp"
#include "cgs/errors.hpp"

namespace cgs::chordal {

ChordalGraph ChordalGraph::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  if (n < 0) throw DomainError("negative vertex count");
  ChordalGraph g;
  g.n = n;
  g.adj.assign(n, {});
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n || u == v) throw DomainError("bad edge");
    g.adj[u].push_back(v);
    g.adj[v].push_back(u);
  }
  for (auto& a : g.adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  return g;
}

ChordalGraph ChordalGraph::complete(int n) {
  std::vector<std::pair<int, int>> e;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) e.emplace_back(u, v);
  return from_edges(n, e);
}

ChordalGraph ChordalGraph::path(int n) {
  std::vector<std::pair<int, int>> e;
  for (int u = 0; u + 1 < n; ++u) e.emplace_back(u, u + 1);
  return from_edges(n, e);
}

ChordalGraph ChordalGraph::cycle(int n) {
  auto e = path(n).edges();
  if (n >= 3) e.emplace_back(0, n - 1);
  return from_edges(n, e);
}

bool ChordalGraph::has_edge(int u, int v) const {
  return std::binary_search(adj[u].begin(), adj[u].end(), v);
}

long long ChordalGraph::edge_count() const {
  long long m = 0;
  for (const auto& a : adj) m += static_cast<long long>(a.size());
  return m / 2;
}

std::vector<std::pair<int, int>> ChordalGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int u = 0; u < n; ++u)
    for (int v : adj[u])
      if (u < v) out.emplace_back(u, v);
  return out;
}

std::vector<std::pair<int, int>> labelled_edges(const ChordalGraph& g) {
  std::vector<int> pos(g.n);
  for (int v = 0; v < g.n; ++v) pos[v] = v;
  if (g.labels) {
    const int k = g.root_clique ? static_cast<int>(g.root_clique->size()) : 0;
    for (int v = 0; v < g.n; ++v) pos[v] = k - 1 + (*g.labels)[v];
    if (g.root_clique)
      for (int i = 0; i < k; ++i) pos[(*g.root_clique)[i]] = i;
  }
  std::vector<std::pair<int, int>> out;
  for (auto [u, v] : g.edges()) out.emplace_back(std::min(pos[u], pos[v]), std::max(pos[u], pos[v]));
  std::sort(out.begin(), out.end());
  return out;
}

nlohmann::json to_json(const ChordalGraph& g, std::uint64_t seed) {
  nlohmann::json j;
  j["n"] = g.n;
  auto edges = nlohmann::json::array();
  for (auto [u, v] : g.edges()) edges.push_back({u, v});
  j["edges"] = std::move(edges);
  j["root_clique"] = g.root_clique ? nlohmann::json(*g.root_clique) : nlohmann::json(nullptr);
  j["labels"] = g.labels ? nlohmann::json(*g.labels) : nlohmann::json(nullptr);
  j["seed"] = seed;
  return j;
}

ChordalGraph from_json(const nlohmann::json& j) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  ChordalGraph g = ChordalGraph::from_edges(j.at("n").get<int>(), edges);
  if (!j.at("root_clique").is_null()) g.root_clique = j.at("root_clique").get<std::vector<int>>();
  if (!j.at("labels").is_null()) g.labels = j.at("labels").get<std::vector<int>>();
  return g;
}

std::string to_dot(const ChordalGraph& g, const std::string& name) {
  std::ostringstream out;
  out << "graph " << name << " {\n";
  for (int v = 0; v < g.n; ++v) {
    out << "  " << v;
    std::vector<std::string> attrs;
    if (g.labels) attrs.push_back("label=\"" + std::to_string((*g.labels)[v]) + "\"");
    if (g.root_clique &&
        std::find(g.root_clique->begin(), g.root_clique->end(), v) != g.root_clique->end())
      attrs.push_back("style=filled");
    if (!attrs.empty()) {
      out << " [";
      for (std::size_t i = 0; i < attrs.size(); ++i) out << (i ? ", " : "") << attrs[i];
      out << "]";
    }
    out << ";\n";
  }
  for (auto [u, v] : g.edges()) out << "  " << u << " -- " << v << ";\n";
  out << "}\n";
  return out.str();
}

}  // namespace cgs::chordal
