// conescale - normalization of factorizations over convex cones
// Copyright 2026 The conescale Authors
// Licensed under Apache 2.0

#pragma once

#include <cstdint>
#include <vector>

#include "conescale/cone.hpp"

namespace conescale {

struct RecoveredMaps {
  Mat g;  // maps A to A-tilde
  Mat q;  // maps B to B-tilde; the inverse-adjoint of g
  std::vector<int> basis_a;
  std::vector<int> basis_b;
  double consistency_residual = 0.0;
};

// Constructive recovery of the linear normalization maps from positionally
// paired spanning sets: select n independent members of B to build L and
// L-tilde with those rows, then g = L-tilde^{-1} L; q analogously from A.
RecoveredMaps recover_linear_maps(const std::vector<Vec>& a, const std::vector<Vec>& a_tilde,
                                  const std::vector<Vec>& b, const std::vector<Vec>& b_tilde);

struct AutomorphismReport {
  bool forward_ok = false;
  bool inverse_ok = false;
  double worst_margin = 0.0;  // most negative relative membership margin seen
  int samples = 0;
};

// Samples boundary and interior points of the cone and checks that g and
// g^{-1} map them back into the cone within tol.
AutomorphismReport verify_automorphism(const ConeDescriptor& cone, const Mat& g, int n_samples,
                                       double tol, std::uint64_t seed = 0);

// The two automorphism families of the half second-order cone from the
// counterexample, parametrized by alpha > 0 and beta, and the corresponding
// dual-cone automorphisms.
Mat half_soc3_automorphism(int family, double alpha, double beta);
Mat half_soc3_dual_automorphism(int family, double alpha, double beta);

struct CounterexampleRecord {
  double m = 0.0;
  double beta_lo = 0.0, beta_hi = 0.0;
  int grid_size = 0;
  double family_min[2] = {0.0, 0.0};  // min over beta of max(|g(a)|, |q(b)|) at optimal alpha
  double best_beta[2] = {0.0, 0.0};
  double best_alpha[2] = {0.0, 0.0};
  double min_max_norm = 0.0;          // min over both families
  double analytic_lower = 0.0;        // sqrt(2) * m
  double delta = 0.0;                 // <a, b> (exactly zero)
  double max_identity_rel_error = 0.0;  // |sqrt(UV) - m sqrt(2 + 2 beta^2)| relative
};

// Certifies that the singleton pair a = (m, 0, m), b = (-m, 0, m) cannot be
// normalized by the automorphism families: the achievable max norm is
// m sqrt(2 + 2 beta^2) >= sqrt(2) m while delta = 0.
CounterexampleRecord counterexample_search(double m, double beta_lo, double beta_hi,
                                           int grid_size);

}  // namespace conescale
