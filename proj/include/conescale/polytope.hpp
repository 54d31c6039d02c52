// conescale - normalization of factorizations over convex cones
// Copyright 2026 The conescale Authors
// Licensed under Apache 2.0

#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <vector>

#include "conescale/scaling.hpp"

namespace conescale {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

// Integer polytope data: lifted points V in Z^{d-1} x {1} and the canonical
// primitive integer facet normals F of cone(V); for lower-dimensional hulls
// both orientations of each affine-hull equality are included.
struct PolytopeInstance {
  int d = 0;
  std::vector<std::vector<BigInt>> v;
  std::vector<std::vector<BigInt>> f;
  BigInt m_observed;     // max ||f||_inf over F
  BigInt m_bound;        // the theorem's analytic bound on M
  double m_bound_log2 = 0.0;
  std::string family;    // "zero-one" or "cyclic"
  long long t = 0;       // cyclic parameter (0 for zero-one)

  std::vector<std::vector<BigInt>> ground_set() const;  // candidate points of the family
};

// V = lifted X, F = facet normals of cone(V); conditions (i)-(iii) of the
// instance theorems are verified exactly.
PolytopeInstance zero_one_instance(int d, const std::vector<std::vector<int>>& x);

// Moment-curve instance V = {(k, k^2, ..., k^{d-1}, 1) : k in X}.
PolytopeInstance cyclic_instance(int d, long long t, const std::vector<long long>& x);

// Canonical nonnegative factorization of the slack matrix over Orthant(|F|):
// a_v = slack row of v, b_f = f-th standard basis vector; carries (V, F)
// labels for the encoding pipeline.
Factorization slack_factorization(const PolytopeInstance& inst);

double big_log2(const BigInt& x);
double big_to_double_exact(const BigInt& x);  // throws beyond 2^53

}  // namespace conescale
