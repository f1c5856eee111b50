#include <algorithm>
#include <functional>

#include "cgs/errors.hpp"
#include "cgs/trees/tree.hpp"

namespace cgs::trees {

namespace {

void append_pairs(std::string& out, const TwoTypeTree& tree, int from, int to) {
  for (int v = from; v < to; ++v) {
    out += std::to_string(tree.black[v]);
    out += ',';
    out += std::to_string(tree.white[v]);
    out += ';';
  }
}

void append_mark(std::string& out, int parent, int slot) {
  out += '|';
  out += std::to_string(parent);
  out += '.';
  out += std::to_string(slot);
}

}  // namespace

int MarkedTree::mark_height() const {
  if (is_lone_white()) return 0;
  const TreeIndex idx(tree);
  return idx.depth.at(mark_parent) + 1;
}

std::string MarkedTree::key() const {
  if (is_lone_white()) return "*";
  std::string out;
  append_pairs(out, tree, 0, tree.black_count());
  append_mark(out, mark_parent, mark_slot);
  return out;
}

std::optional<MarkedTree> fringe(const MarkedTree& tree, int h) {
  if (h < 0) return std::nullopt;
  if (h == 0) return MarkedTree::lone_white();
  if (tree.is_lone_white()) return std::nullopt;
  const TreeIndex idx(tree.tree);
  int top = tree.mark_parent;
  for (int i = 1; i < h; ++i) {
    top = idx.parent[top];
    if (top < 0) return std::nullopt;
  }
  MarkedTree out;
  out.tree.black.assign(tree.tree.black.begin() + top, tree.tree.black.begin() + idx.end[top]);
  out.tree.white.assign(tree.tree.white.begin() + top, tree.tree.white.begin() + idx.end[top]);
  out.mark_parent = tree.mark_parent - top;
  out.mark_slot = tree.mark_slot;
  return out;
}

double fringe_probability(const OffspringLaw& law, const MarkedTree& tau) {
  if (tau.is_lone_white()) return 1.0;
  if (!tau.tree.valid()) throw DomainError("fringe tree is not a valid two-type tree");
  if (tau.mark_parent < 0 || tau.mark_parent >= tau.tree.black_count() || tau.mark_slot < 0 ||
      tau.mark_slot >= tau.tree.white[tau.mark_parent])
    throw DomainError("mark is not a white vertex of the fringe tree");
  double p = 1;
  for (int v = 0; v < tau.tree.black_count(); ++v) p *= law(tau.tree.black[v], tau.tree.white[v]);
  return p / law.mean_white();
}

FringeCensus fringe_census(const TwoTypeTree& tree, int h, int max_black) {
  FringeCensus c;
  const long long n = tree.white_count();
  if (h <= 0) {
    if (n > 0) c.counts["*"] = n;
    return c;
  }
  const TreeIndex idx(tree);
  long long eligible = 0, counted = 0;
  for (int v = 0; v < tree.black_count(); ++v)
    if (idx.depth[v] >= h - 1) eligible += tree.white[v];
  for (int top = 0; top < tree.black_count(); ++top) {
    if (idx.end[top] - top > max_black) continue;
    std::string prefix;
    append_pairs(prefix, tree, top, idx.end[top]);
    for (int v = top; v < idx.end[top]; ++v) {
      if (idx.depth[v] - idx.depth[top] != h - 1) continue;
      for (int s = 0; s < tree.white[v]; ++s) {
        std::string key = prefix;
        append_mark(key, v - top, s);
        ++c.counts[key];
        ++counted;
      }
    }
  }
  c.other = eligible - counted;
  c.undefined = n - eligible;
  return c;
}

std::vector<MarkedTree> enumerate_fringes(const OffspringLaw& law, int h, int max_black) {
  if (h <= 0) return {MarkedTree::lone_white()};
  std::vector<std::pair<int, int>> support;
  for (const auto& e : law.entries)
    if (e.p > 0 && e.black < max_black) support.emplace_back(e.black, e.white);
  std::vector<MarkedTree> out;
  TwoTypeTree cur;
  std::function<void(long long)> grow = [&](long long need) {
    if (need == 0) {
      const TreeIndex idx(cur);
      for (int v = 0; v < cur.black_count(); ++v) {
        if (idx.depth[v] != h - 1) continue;
        for (int s = 0; s < cur.white[v]; ++s) out.push_back({cur, v, s, {}});
      }
      return;
    }
    for (const auto& [a, b] : support) {
      // Every pending black child needs at least one more vertex.
      if (cur.black_count() + 1 + (need - 1 + a) > max_black) continue;
      cur.black.push_back(a);
      cur.white.push_back(b);
      grow(need - 1 + a);
      cur.black.pop_back();
      cur.white.pop_back();
    }
  };
  grow(1);
  return out;
}

}  // namespace cgs::trees
