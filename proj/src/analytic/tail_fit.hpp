#pragma once

#include <utility>
#include <vector>

namespace cgs::analytic::detail {

// Given (index, ln m_index) for the nonzero blocks of a series in increasing
// index order, fits m ~ A n^-alpha q^n through three points spread over the
// upper half and returns the sum of the fitted continuation past the last
// block. Infinite when the fit does not decay or there are too few points.
// log_ratio, when given, receives the fitted ln q (NaN when there is no fit).
long double fitted_tail(const std::vector<std::pair<int, long double>>& blocks, double* log_ratio = nullptr);

}  // namespace cgs::analytic::detail
