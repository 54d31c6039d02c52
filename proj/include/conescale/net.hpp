// conescale - normalization of factorizations over convex cones
// Copyright 2026 The conescale Authors
// Licensed under Apache 2.0

#pragma once

#include <vector>

#include "conescale/cone.hpp"
#include "conescale/scaling.hpp"

namespace conescale {

// Implicit cubic-lattice net for the ball B_0(rho): lattice (2 eps / sqrt(n)) Z^n,
// whose covering radius is exactly eps.
struct NetSpec {
  int n = 0;
  double rho = 0.0;
  double eps = 0.0;

  NetSpec(int n_, double rho_, double eps_);
  double lattice_spacing() const;
};

// Cardinality bound e (n ln n + n ln ln n + 5 n) (rho/eps)^n; requires n >= 3
// and rho/eps >= n.
double net_cardinality_bound(int n, double rho, double eps);
double net_cardinality_bound_log2(int n, double rho, double eps);

// Coordinatewise rounding to the lattice; ||u - round(u)|| <= eps whenever
// ||u|| <= rho.
Vec round_to_net(const NetSpec& spec, const Vec& u);

// All lattice points within rho + eps of the origin (covers every rounded
// image of the ball).  Demonstration-scale only.
std::vector<Vec> enumerate_net(const NetSpec& spec, std::size_t max_points = 2000000);

// Indices of a row subset of size rank(rows) that is locally maximal-volume
// under single-element swaps; consequently every row's expansion
// coefficients in the selected basis are at most 1 in magnitude.
std::vector<int> max_volume_subsystem(const std::vector<Vec>& rows);

struct EncodeOptions {
  enum class RhoVariant { d_plus_1, n_plus_1 };
  RhoVariant rho_variant = RhoVariant::d_plus_1;
  double v_inf_bound = 1.0;  // hypothesis bound on ||v||_inf
  double check_tol = 1e-9;
};

struct EncodedPolytope {
  ConeDescriptor cone;
  int d = 0;  // dimension hosting the inequality vectors
  int n = 0;  // ambient dimension of the cone
  std::vector<Vec> f;  // n + d selected inequality vectors (with repetition)
  std::vector<Vec> u;  // matching net-rounded dual vectors
  double rho = 0.0, eps = 0.0, delta = 0.0;
  double m_bound = 0.0, f_c = 0.0;
};

// Compact encoding: selects a locally maximal-volume subsystem of the stacked
// rows (f, b_f), rounds the selected dual vectors to the net, and pads the
// selection to exactly n + d entries by repeating the last row.
EncodedPolytope encode(const Factorization& fac, double m_bound, double f_c,
                       const EncodeOptions& opts = {});

struct Slab {
  Vec normal;
  double center = 0.0;
  double halfwidth = 0.0;
};

struct FeasibilityResult {
  bool feasible = false;
  bool indeterminate = false;
  double violation = 0.0;  // max slab excess at the best witness found
  Vec witness;
};

// Decides whether some y in C intersect B_0(rho) satisfies every slab
// |<normal, y> - center| <= halfwidth, by alternating projections with a
// projected-subgradient fallback.  Accepts iff the final violation is <= tol;
// results in (tol, 2 tol] at the iteration cap are flagged indeterminate.
FeasibilityResult feasibility_check(const ConeDescriptor& cone, double rho,
                                    const std::vector<Slab>& slabs, double tol,
                                    int max_iters = 4000);

struct ReconstructionResult {
  std::vector<Vec> accepted;
  std::vector<FeasibilityResult> details;  // one per candidate
  bool any_indeterminate = false;
};

// Per-candidate convex feasibility test of the encoded slab system.
ReconstructionResult reconstruct(const EncodedPolytope& enc, const std::vector<Vec>& candidates);

}  // namespace conescale
