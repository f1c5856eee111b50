#pragma once

#include <utility>
#include <vector>

#include "cgs/rng.hpp"
#include "cgs/trees/tree.hpp"

namespace cgs::trees {

// Alias table over the entries of an offspring law, renormalised to sum 1.
class OffspringSampler {
 public:
  explicit OffspringSampler(const OffspringLaw& law);

  // (black, white) children of one black vertex.
  std::pair<int, int> operator()(Rng& rng) const {
    const auto i = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(prob_.size())));
    const std::size_t j = rng.uniform01() < prob_[i] ? i : alias_[i];
    return {black_[j], white_[j]};
  }

  const OffspringLaw& law() const { return law_; }
  // c when every entry has black = c * white, otherwise -1.
  int ratio() const { return ratio_; }
  // Set when the law is a single compound Poisson piece (c*m, m) with
  // m ~ Poisson(poisson_mean); the conditioned tree then has a closed form.
  bool poisson() const { return poisson_; }
  double poisson_mean() const { return poisson_mean_; }

 private:
  OffspringLaw law_;
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
  std::vector<int> black_, white_;
  int ratio_ = -1;
  bool poisson_ = false;
  double poisson_mean_ = 0;
};

// Unconditioned tree, generated depth-first. OverflowError once more than
// node_cap black vertices have been generated.
TwoTypeTree sample_bgw(const OffspringSampler& law, Rng& rng, long long node_cap);

enum class ConditionMethod {
  // Closed form for single-piece Poisson laws, cycle lemma with rejection on
  // the white count when black = c * white, plain rejection otherwise.
  automatic,
  // Rejection over sample_bgw, abandoning a draw once it has too many white
  // vertices.
  rejection,
};

struct ConditionStats {
  long long attempts = 0;
  long long generated = 0;  // black vertices drawn, including rejected ones
};

// Tree conditioned on n white vertices. ResourceError with the attempt
// statistics when max_attempts draws were all rejected.
TwoTypeTree sample_conditioned(const OffspringSampler& law, long long n, Rng& rng,
                               long long max_attempts,
                               ConditionMethod method = ConditionMethod::automatic,
                               ConditionStats* stats = nullptr);

// Uniform tree with n white vertices among those where every vertex has
// ratio * (white children) black children, each weighted by the product of
// 1/(white children)! (the Poisson law conditioned on its size).
TwoTypeTree sample_poisson_conditioned(int ratio, long long n, Rng& rng);

// Samplers for the spine construction: plain law, black-size-biased law on
// the spine and white-size-biased law at the tip.
struct SpineLaws {
  explicit SpineLaws(const OffspringLaw& law);
  OffspringSampler plain, by_black, by_white;
};

// Spine tree of height ell: u_0..u_{ell-1} draw from the black-biased law
// and continue through a uniform black child, the tip u_ell draws from the
// white-biased law and marks a uniform white child; all other black
// children get independent unconditioned trees. OverflowError past
// node_cap black vertices.
MarkedTree sample_spine(const SpineLaws& laws, int ell, Rng& rng, long long node_cap);

// The spine alone: the same draws for u_0..u_ell without the hanging
// trees, which do not affect distances along the spine.
struct SpineStep {
  int black = 0;
  int white = 0;
  int next = 0;  // index of the spine child among the black children, or of the marked white child at the tip
};
std::vector<SpineStep> sample_spine_path(const SpineLaws& laws, int ell, Rng& rng);

}  // namespace cgs::trees
