#pragma once

#include <map>
#include <utility>

#include "cgs/gfchain/chain.hpp"

namespace cgs::gfchain {

// The last-level component series in long double, with every clique variable
// other than x1 and x_k set to 1 and x1 rescaled:
//   terms[{b, a}] = [x1^b x_k^a] component(k) * scale^b.
// For k = 1 the key is {b, b}. Used where the offspring law or the
// singularity needs more terms than the exact chain carries.
struct FloatComponent {
  int order = 0;
  long double scale = 1;
  // True when the series is a polynomial (no implicit equation was solved),
  // so truncation loses nothing.
  bool exact = false;
  std::map<std::pair<int, int>, long double> terms;
};

// Re-runs the chain of `shape` (same t, k and tracking) in floating point to
// x1-order `order`. `scale` should be close to the dominant singularity so
// that scaled coefficients stay within long double range.
FloatComponent float_component(const GFChain& shape, int order, long double scale);

// Largest order float_component accepts for clique number t.
int max_float_order(int t);

// Floating copy of the exact component series (same layout as above).
FloatComponent float_component_exact(const GFChain& chain, long double scale);

}  // namespace cgs::gfchain
