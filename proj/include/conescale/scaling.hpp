// conescale - normalization of factorizations over convex cones
// Copyright 2026 The conescale Authors
// Licensed under Apache 2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "conescale/barrier.hpp"
#include "conescale/cone.hpp"

namespace conescale {

// Paired sets A in C and B in C*.  Labels optionally link members of A to
// polytope points and members of B to inequality vectors (used by the
// encoding pipeline).
struct Factorization {
  ConeDescriptor cone;
  std::vector<Vec> a;
  std::vector<Vec> b;
  std::vector<Vec> point_labels;  // one per member of a, or empty
  std::vector<Vec> ineq_labels;   // one per member of b, or empty
};

// Largest pairwise inner product max_{a,b} <a, b>.
double max_pairing(const Factorization& fac);

// Checks membership of both sets and label inventories; throws
// PreconditionError naming the failing set.
void validate_factorization(const Factorization& fac, double tol = 1e-8);

struct SolveOptions {
  double tol = 1e-8;        // final smoothing level, relative to the objective scale
  double kkt_tol = 1e-7;    // a-posteriori optimality target, relative to 1 + delta
  int max_iters = 40000;    // total quasi-Newton iterations over all stages
  double active_tol = 1e-6;  // active-constraint threshold, relative to 1 + |t|
  double eps_zero = 0.0;     // delta = 0 scaling; 0 selects min(1, 1/(1 + max norm))
  std::uint64_t seed = 0;
  bool blockwise = false;   // normalize each product block separately
  bool debug = false;       // assert per-stage monotone descent
};

struct Sym1Solution {
  Vec w;                 // interior minimizer
  double t = 0.0;        // optimal value (max constraint value at w)
  Vec lambda;            // multipliers on A (size |A|)
  Vec mu;                // multipliers on B (size |B|)
  double kkt_residual = 0.0;
  double complementarity_violation = 0.0;
  int iterations = 0;
};

struct ScalingCertificate {
  ScalingOperator scaling;  // L; meaningful when epsilon_scaled is false
  int theta = 0;
  double delta = 0.0;
  double t_bar = 0.0;
  double max_primal_norm_sq = 0.0;
  double max_dual_norm_sq = 0.0;
  double inner_product_max_error = 0.0;
  double kkt_residual = 0.0;
  bool epsilon_scaled = false;  // delta = 0 path: both sets scaled by epsilon
  double epsilon = 0.0;
};

// Minimizes t subject to <-grad F(w), a> <= t for a in A, <w, b> <= t for
// b in B, w interior, by log-sum-exp smoothing with a quasi-Newton interior
// line-search method.  Optimality is certified a posteriori through
// kkt_residual.
Sym1Solution solve_sym1(const Factorization& fac, const SolveOptions& opts = {});

// max( max_a <hess F(w) a, a>, max_b <hess F(w)^{-1} b, b> ).
double evaluate_sym2(const ConeDescriptor& cone, const Vec& w, const std::vector<Vec>& a,
                     const std::vector<Vec>& b);

// Scales A by L and B by L^{-1} where L is the Hessian square root at the
// SYM1 optimum; falls back to epsilon-scaling when delta = 0.
std::pair<Factorization, ScalingCertificate> normalize_factorization(
    const Factorization& fac, const SolveOptions& opts = {});

// The unique interior w with hess F(w) a = b, per-block closed forms
// (orthant sqrt(a/b), psd geometric mean, second-order two-parameter form).
Vec nt_scaling_point(const ConeDescriptor& cone, const Vec& a, const Vec& b);

// Independent iterative route: damped Newton on the residual
// hess F(w) a - b with a finite-difference Jacobian.
Vec nt_scaling_point_newton(const ConeDescriptor& cone, const Vec& a, const Vec& b,
                            double tol = 1e-12, int max_iter = 200);

struct KktResult {
  double residual = 0.0;
  Vec lambda;
  Vec mu;
  double complementarity_violation = 0.0;
};

// Nonnegative least squares for the stationarity condition
//   hess F(w) (sum lambda_a a) = sum mu_b b,  sum lambda + sum mu = 1,
// supported on the constraints active at (w, t) within active_tol.
KktResult kkt_residual(const Factorization& fac, const Vec& w, double t,
                       double active_tol = 1e-6,
                       const std::optional<Vec>& seed_weights = std::nullopt);

}  // namespace conescale
