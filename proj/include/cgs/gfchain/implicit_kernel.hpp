#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace cgs::gfchain {

// Sparse polynomial in the non-graded variables. Keys pack up to four
// exponents, 16 bits each, lowest field first. Sorted by key.
using Slice = std::vector<std::pair<std::uint64_t, mpz_class>>;

inline constexpr int kMaxPackedVariables = 4;
inline constexpr int kMaxPackedExponent = 0xffff;

std::uint64_t pack(const std::vector<int>& exponents);
std::vector<int> unpack(std::uint64_t key, std::size_t count);

// One term of the component series in labelled form:
// value * x1^grade / grade! * (packed monomial in the other variables).
// `marked` is the exponent of the substituted variable; when the substituted
// variable is x1 itself it equals `grade`.
struct ComponentTerm {
  int grade = 0;
  std::uint64_t key = 0;
  int marked = 0;
  mpz_class value;
};

struct ImplicitProblem {
  std::vector<ComponentTerm> terms;
  std::vector<int> bounds;  // bounds of the packed variables
  int order = 0;            // solve for grades 0..order
};

struct ImplicitSolution {
  // labelled[n] = n! [x1^n] Y, a slice in the packed variables.
  std::vector<Slice> labelled;
  std::vector<bool> saturated;  // per packed variable
};

// Solves Y = exp(H(x1, ..., marked * Y, ...)) coefficientwise, where H is the
// component series. Every component term must have grade >= 1 (otherwise the
// equation is not triangular and ConsistencyError is raised).
ImplicitSolution solve_implicit_serial(const ImplicitProblem& problem);
// Same result, power-table updates split across OpenMP threads.
ImplicitSolution solve_implicit_parallel(const ImplicitProblem& problem);

}  // namespace cgs::gfchain
