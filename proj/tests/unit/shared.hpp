#pragma once

#include "cgs/chordal/samplers.hpp"

// Preparing the (2,1) sampler certifies its singularity from a long float
// re-run of the chain; tests share one instance.
inline const cgs::chordal::GraphSampler& sampler_2_1() {
  static const cgs::chordal::GraphSampler s(2, 1);
  return s;
}
