#include "cgs/trees/sampling.hpp"

#include <numeric>
#include <string>

#include "cgs/errors.hpp"

namespace cgs::trees {

OffspringSampler::OffspringSampler(const OffspringLaw& law) : law_(law) {
  std::vector<double> p;
  for (const auto& e : law.entries) {
    if (!(e.p > 0)) continue;
    if (e.black < 0 || e.white < 0) throw DomainError("negative child count in offspring law");
    black_.push_back(e.black);
    white_.push_back(e.white);
    p.push_back(e.p);
  }
  if (p.empty()) throw DomainError("offspring law has no mass");
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  const std::size_t n = p.size();

  // Vose's alias method.
  prob_.assign(n, 1.0);
  alias_.resize(n);
  std::iota(alias_.begin(), alias_.end(), std::size_t{0});
  std::vector<double> scaled(n);
  std::vector<std::size_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = p[i] / total * static_cast<double>(n);
    (scaled[i] < 1 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const std::size_t s = small.back(), l = large.back();
    small.pop_back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] -= 1 - scaled[s];
    if (scaled[l] < 1) {
      large.pop_back();
      small.push_back(l);
    }
  }

  ratio_ = -2;
  for (std::size_t i = 0; i < n && ratio_ != -1; ++i) {
    if (white_[i] == 0) {
      if (black_[i] != 0) ratio_ = -1;
    } else if (black_[i] % white_[i] != 0) {
      ratio_ = -1;
    } else if (ratio_ == -2) {
      ratio_ = black_[i] / white_[i];
    } else if (black_[i] != ratio_ * white_[i]) {
      ratio_ = -1;
    }
  }
  if (ratio_ == -2) ratio_ = 0;

  if (law.pieces.size() == 1 && law.pieces[0].white == 1 && ratio_ >= 0 &&
      law.pieces[0].black == ratio_) {
    poisson_ = true;
    poisson_mean_ = law.pieces[0].weight;
  }
}

TwoTypeTree sample_bgw(const OffspringSampler& law, Rng& rng, long long node_cap) {
  TwoTypeTree t;
  long long need = 1;
  while (need > 0) {
    if (static_cast<long long>(t.black.size()) >= node_cap)
      throw OverflowError("tree exceeded " + std::to_string(node_cap) + " black vertices");
    const auto [a, b] = law(rng);
    t.black.push_back(a);
    t.white.push_back(b);
    need += a - 1;
  }
  return t;
}

namespace {

// Cycle lemma: exactly one rotation of a sequence with sum(a - 1) = -1 is a
// preorder encoding, the one starting after the first minimum of the
// partial sums.
TwoTypeTree rotate_to_tree(std::vector<int>& black, std::vector<int>& white) {
  const std::size_t n = black.size();
  long long sum = 0, best = 1;
  std::size_t start = 0;
  for (std::size_t j = 0; j < n; ++j) {
    sum += black[j] - 1;
    if (sum < best) {
      best = sum;
      start = j + 1;
    }
  }
  if (start == n) start = 0;
  TwoTypeTree t;
  t.black.reserve(n);
  t.white.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    t.black.push_back(black[(start + j) % n]);
    t.white.push_back(white[(start + j) % n]);
  }
  return t;
}

[[noreturn]] void exhausted(const ConditionStats& s, long long n) {
  throw ResourceError("no tree with " + std::to_string(n) + " white vertices after " +
                      std::to_string(s.attempts) + " attempts (" + std::to_string(s.generated) +
                      " black vertices generated)");
}

}  // namespace

TwoTypeTree sample_poisson_conditioned(int ratio, long long n, Rng& rng) {
  if (n < 0 || ratio < 0) throw DomainError("bad Poisson tree parameters");
  // Independent Poisson white counts conditioned on their sum are
  // multinomial with equal cells.
  const long long cells = ratio * n + 1;
  std::vector<int> black(cells, 0), white(cells, 0);
  for (long long i = 0; i < n; ++i) ++white[rng.below(static_cast<std::uint64_t>(cells))];
  for (long long i = 0; i < cells; ++i) black[i] = ratio * white[i];
  return rotate_to_tree(black, white);
}

TwoTypeTree sample_conditioned(const OffspringSampler& law, long long n, Rng& rng,
                               long long max_attempts, ConditionMethod method,
                               ConditionStats* stats) {
  if (n < 1) throw DomainError("conditioned tree needs at least one white vertex");
  ConditionStats local;
  ConditionStats& s = stats ? *stats : local;
  s = {};
  std::vector<int> black, white;

  if (method == ConditionMethod::automatic && law.poisson()) {
    s.attempts = 1;
    s.generated = law.ratio() * n + 1;
    return sample_poisson_conditioned(law.ratio(), n, rng);
  }

  if (method == ConditionMethod::automatic && law.ratio() >= 0) {
    // n white vertices force c*n + 1 black ones; draw that many and keep
    // the draw when the white count is exactly n.
    const long long cells = law.ratio() * n + 1;
    black.reserve(cells);
    white.reserve(cells);
    while (s.attempts < max_attempts) {
      ++s.attempts;
      black.clear();
      white.clear();
      long long whites = 0;
      for (long long i = 0; i < cells && whites <= n; ++i) {
        const auto [a, b] = law(rng);
        black.push_back(a);
        white.push_back(b);
        whites += b;
      }
      s.generated += static_cast<long long>(black.size());
      if (whites == n && static_cast<long long>(black.size()) == cells)
        return rotate_to_tree(black, white);
    }
    exhausted(s, n);
  }

  while (s.attempts < max_attempts) {
    ++s.attempts;
    TwoTypeTree t;
    long long need = 1, whites = 0;
    while (need > 0 && whites <= n) {
      const auto [a, b] = law(rng);
      t.black.push_back(a);
      t.white.push_back(b);
      need += a - 1;
      whites += b;
    }
    s.generated += t.black_count();
    if (need == 0 && whites == n) return t;
  }
  exhausted(s, n);
}

SpineLaws::SpineLaws(const OffspringLaw& law)
    : plain(law), by_black(analytic::biased_by_black(law)), by_white(analytic::biased_by_white(law)) {}

MarkedTree sample_spine(const SpineLaws& laws, int ell, Rng& rng, long long node_cap) {
  if (ell < 0) throw DomainError("spine length must be nonnegative");
  MarkedTree out;
  TwoTypeTree& t = out.tree;
  auto emit = [&](int a, int b) {
    if (static_cast<long long>(t.black.size()) >= node_cap)
      throw OverflowError("spine tree exceeded " + std::to_string(node_cap) + " black vertices");
    t.black.push_back(a);
    t.white.push_back(b);
  };
  auto hang = [&] {
    long long need = 1;
    while (need > 0) {
      const auto [a, b] = laws.plain(rng);
      emit(a, b);
      need += a - 1;
    }
  };
  // Preorder: each spine vertex, the trees left of the spine child, then the
  // next spine vertex; the trees right of the spine come after the tip's
  // subtree, innermost first.
  std::vector<std::pair<int, int>> right;  // (black children, spine child index)
  for (int i = 0; i < ell; ++i) {
    const auto [a, b] = laws.by_black(rng);
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(a)));
    out.spine.push_back(t.black_count());
    emit(a, b);
    for (int c = 0; c < j; ++c) hang();
    right.emplace_back(a, j);
  }
  const auto [a, b] = laws.by_white(rng);
  out.mark_slot = static_cast<int>(rng.below(static_cast<std::uint64_t>(b)));
  out.mark_parent = t.black_count();
  out.spine.push_back(out.mark_parent);
  emit(a, b);
  for (int c = 0; c < a; ++c) hang();
  for (auto it = right.rbegin(); it != right.rend(); ++it)
    for (int c = it->second + 1; c < it->first; ++c) hang();
  return out;
}

std::vector<SpineStep> sample_spine_path(const SpineLaws& laws, int ell, Rng& rng) {
  if (ell < 0) throw DomainError("spine length must be nonnegative");
  std::vector<SpineStep> out;
  out.reserve(static_cast<std::size_t>(ell) + 1);
  for (int i = 0; i <= ell; ++i) {
    const auto [a, b] = i < ell ? laws.by_black(rng) : laws.by_white(rng);
    const int choices = i < ell ? a : b;
    out.push_back({a, b, static_cast<int>(rng.below(static_cast<std::uint64_t>(choices)))});
  }
  return out;
}

}  // namespace cgs::trees
