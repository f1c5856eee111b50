#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "cgs/gfchain/chain.hpp"
#include "cgs/gfchain/float_chain.hpp"

namespace cgs::analytic {

using gfchain::GFChain;

struct Singularity {
  double rho = 0;
  double y = 0;  // value of the rooted series at rho
  double rho_err = 0;
  double y_err = 0;
  double tail = 0;  // tail bound of the component series at (rho, y)
  // Component coefficients the point was computed from. Past the exact
  // chain order these come from a long double re-run of the chain.
  std::shared_ptr<const gfchain::FloatComponent> component;
};

struct SingularityOptions {
  double tol = 1e-9;
  // Highest order of the floating re-run used when the exact chain is too
  // short to certify tol.
  int max_order = 32000;
};

// Dominant singularity of the rooted series at the last level, from the
// implicit equation y = exp(H(x, y)). For fixed x the map y -> y - exp(H) is
// concave, so a fixed point exists iff its maximum is >= 0; rho is the
// largest such x and y the maximiser there. The reported point solves the
// truncated system; the error bar also covers the bracket obtained by adding
// the tail bound. PrecisionError when max_order cannot certify tol.
Singularity find_singularity(const GFChain& chain, const SingularityOptions& opts);
inline Singularity find_singularity(const GFChain& chain, double tol = 1e-9) {
  return find_singularity(chain, SingularityOptions{tol});
}

// Joint law of (black children, white children) of a black vertex of the
// critical two-type tree, restricted to a, b <= cutoff.
struct OffspringLaw {
  struct Entry {
    int black;
    int white;
    double p;
  };
  struct Piece {
    int black;
    int white;
    double weight;
  };
  int cutoff = 0;
  double deficit = 0;          // 1 - total tabulated mass
  std::vector<Entry> entries;  // p > 0, sorted by (black, white)
  // Compound Poisson form of the same law, free of the cutoff: piece i
  // occurs Poisson(weight) times and contributes (black, white) children.
  // Empty for hand-made and size-biased laws.
  std::vector<Piece> pieces;

  double operator()(int a, int b) const;
  double mean_black() const;
  double mean_white() const;
  double var_black() const;
  double var_white() const;
  double total() const;
};

constexpr double kDefaultDeficit = 1e-12;

// cutoff unset: smallest value with deficit < eps. Past the component order
// the table is incomplete and the missing mass shows up in the deficit.
// RangeError when the deficit at the chosen cutoff exceeds eps.
OffspringLaw offspring_law(const GFChain& chain, const Singularity& s,
                           std::optional<int> cutoff = std::nullopt, double eps = kDefaultDeficit);

// a * P(a, b): law along the spine, next spine vertex among the black children.
OffspringLaw biased_by_black(const OffspringLaw& law);
// b * P(a, b) / E[white children]: law at the parent of a uniform white vertex.
OffspringLaw biased_by_white(const OffspringLaw& law);

// Probability that the unconditioned tree has exactly n white vertices.
double size_probability(const GFChain& chain, const Singularity& s, int n);

struct TreeConstants {
  double rho = 0, y = 0;
  double mean_black = 0, mean_white = 0, var_black = 0, var_white = 0;
  double kappa_tree = 0;           // sqrt(var_black * mean_white) / 2
  double size_prob_constant = 0;   // lim n^{3/2} P(#white = n)
  double rho_err = 0, y_err = 0;
  double mean_black_err = 0, mean_white_err = 0, var_black_err = 0;
  double kappa_tree_err = 0, size_prob_constant_err = 0;
};

TreeConstants tree_constants(const GFChain& chain, const Singularity& s, const OffspringLaw& law);

}  // namespace cgs::analytic
