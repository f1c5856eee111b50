#include <algorithm>
#include <cmath>

#include "cgs/errors.hpp"
#include "cgs/trees/tree.hpp"

namespace cgs::trees {

long long TwoTypeTree::white_count() const {
  long long n = 0;
  for (int w : white) n += w;
  return n;
}

bool TwoTypeTree::valid() const {
  if (black.empty() || black.size() != white.size()) return false;
  long long need = 1;
  for (std::size_t i = 0; i < black.size(); ++i) {
    if (need <= 0 || black[i] < 0 || white[i] < 0) return false;
    need += black[i] - 1;
  }
  return need == 0;
}

TreeIndex::TreeIndex(const TwoTypeTree& tree) {
  if (!tree.valid()) throw DomainError("malformed two-type tree");
  const int n = tree.black_count();
  parent.assign(n, -1);
  depth.assign(n, 0);
  end.assign(n, n);
  first_white.assign(n, 0);
  // Stack of (vertex, black children still to come).
  std::vector<std::pair<int, int>> open;
  long long whites = 0;
  for (int v = 0; v < n; ++v) {
    first_white[v] = whites;
    whites += tree.white[v];
    if (!open.empty()) {
      parent[v] = open.back().first;
      depth[v] = depth[parent[v]] + 1;
      --open.back().second;
    }
    open.emplace_back(v, tree.black[v]);
    while (!open.empty() && open.back().second == 0) {
      end[open.back().first] = v + 1;
      open.pop_back();
    }
  }
}

std::vector<int> TreeIndex::children(int v) const {
  std::vector<int> out;
  for (int c = v + 1; c < end[v]; c = end[c]) out.push_back(c);
  return out;
}

int height(const TwoTypeTree& tree) {
  const TreeIndex idx(tree);
  int h = 0;
  for (int v = 0; v < tree.black_count(); ++v)
    h = std::max(h, idx.depth[v] + (tree.white[v] > 0 ? 1 : 0));
  return h;
}

DegreeProfile degree_profile(const TwoTypeTree& tree, double u) {
  if (!tree.valid()) throw DomainError("malformed two-type tree");
  DegreeProfile p;
  for (int v = 0; v < tree.black_count(); ++v) {
    ++p.black_degree[tree.black[v]];
    p.max_black_degree = std::max(p.max_black_degree, tree.black[v]);
    p.max_white_degree = std::max(p.max_white_degree, tree.white[v]);
  }
  u = std::clamp(u, 0.0, 1.0);
  const auto rank = [u](long long total) {
    return std::max(1LL, static_cast<long long>(std::ceil(u * static_cast<double>(total))));
  };
  p.position = rank(tree.black_count());
  const long long n = tree.white_count();
  if (n > 0) {
    const long long target = rank(n);
    long long seen = 0;
    for (int v = 0; v < tree.black_count(); ++v) {
      seen += tree.white[v];
      if (seen >= target) {
        p.parent_position = v + 1;
        break;
      }
    }
  }
  return p;
}

}  // namespace cgs::trees
