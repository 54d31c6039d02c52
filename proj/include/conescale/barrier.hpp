// conescale - normalization of factorizations over convex cones
// Copyright 2026 The conescale Authors
// Licensed under Apache 2.0

#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "conescale/cone.hpp"

namespace conescale {

// Barrier parameter of the standard self-scaled barrier: n (orthant),
// 2 (second-order), k (psd side), additive over products.  Equals the
// Caratheodory number of the cone.
int theta(const ConeDescriptor& cone);

// Self-adjoint block-structured linear map, a Hessian square root of the
// barrier at its defining point.  The operator and its inverse map the cone
// onto itself.
class ScalingOperator {
 public:
  Vec apply(const Vec& h) const;
  Vec inverse_apply(const Vec& h) const;
  // The operator is self-adjoint, so the adjoint accessors coincide with the
  // maps themselves; the inverse-adjoint is the dual-side scaling.
  Vec adjoint_apply(const Vec& h) const { return apply(h); }
  Vec inverse_adjoint_apply(const Vec& h) const { return inverse_apply(h); }

  Mat dense() const;
  Mat inverse_dense() const;
  const ConeDescriptor& cone() const { return cone_; }
  bool empty() const { return blocks_.empty(); }

  // Block-diagonal operator on the product of the parts' cones.
  static ScalingOperator concat(const std::vector<ScalingOperator>& parts);

 private:
  friend class BarrierPoint;
  struct BlockOp {
    BlockType type;
    Vec diag;       // orthant: 1/x_i
    Mat fwd, inv;   // second-order: dense sqrt and its inverse;
                    // psd: X^{-1/2} and X^{1/2} (congruence factors)
  };
  ConeDescriptor cone_;
  std::vector<BlockOp> blocks_;
};

// A strictly interior point together with cached per-block factorizations of
// the barrier Hessian.  Immutable after construction.
class BarrierPoint {
 public:
  BarrierPoint(ConeDescriptor cone, Vec x, double interior_tol = kInteriorTol);

  const ConeDescriptor& cone() const { return cone_; }
  const Vec& x() const { return x_; }

  double value() const;
  Vec gradient() const;  // nabla F(x)
  Vec hessian_apply(const Vec& h) const;
  Vec hessian_inverse_apply(const Vec& h) const;
  ScalingOperator hessian_sqrt() const;

  // Largest step to the boundary of the cone from x along direction d
  // (+infinity when the ray stays interior).
  double max_feasible_step(const Vec& d) const;

 private:
  struct OrthantCache {
    Vec inv;  // 1/x_i
  };
  struct SocCache {
    double s;  // x_n^2 - ||x_rest||^2
  };
  struct PsdCache {
    Mat vectors;
    Vec values;
  };
  using Cache = std::variant<OrthantCache, SocCache, PsdCache>;

  ConeDescriptor cone_;
  Vec x_;
  std::vector<Cache> cache_;
};

// Free-function forms of the barrier operations.
inline double barrier_value(const BarrierPoint& p) { return p.value(); }
inline Vec barrier_gradient(const BarrierPoint& p) { return p.gradient(); }
inline Vec hessian_apply(const BarrierPoint& p, const Vec& h) { return p.hessian_apply(h); }
inline Vec hessian_inverse_apply(const BarrierPoint& p, const Vec& h) {
  return p.hessian_inverse_apply(h);
}
inline ScalingOperator hessian_sqrt(const BarrierPoint& p) { return p.hessian_sqrt(); }

// Applies x -> -nabla F(x) twice.  For the self-scaled barriers implemented
// here the conjugate gradient map equals the map itself, so the round trip
// returns x.
Vec conjugate_gradient_map(const BarrierPoint& p);

}  // namespace conescale
