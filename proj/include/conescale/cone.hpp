// conescale - normalization of factorizations over convex cones
// Copyright 2026 The conescale Authors
// Licensed under Apache 2.0

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "conescale/errors.hpp"

namespace conescale {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Default tolerances.  Membership allows a slightly negative margin,
// interiority requires a strictly positive one.
inline constexpr double kMembershipTol = 1e-10;
inline constexpr double kInteriorTol = 1e-9;

enum class BlockType { orthant, second_order, psd, half_soc3 };

struct Block {
  BlockType type;
  // orthant / second_order: ambient dimension of the block;
  // psd: side length of the matrix; half_soc3: fixed, 3 ambient coordinates.
  int size;

  int ambient_len() const;
};

struct BlockSlice {
  int block = 0;
  int offset = 0;
  int length = 0;
};

// A product of primitive cone blocks.  half_soc3 is the non-homogeneous
// counterexample cone {x in R^3 : x1^2 + x2^2 <= x3^2, x1 >= 0, x3 >= 0}
// and is only allowed as a standalone single-block cone.
class ConeDescriptor {
 public:
  ConeDescriptor() = default;
  explicit ConeDescriptor(std::vector<Block> blocks);

  static ConeDescriptor orthant(int dim);
  static ConeDescriptor second_order(int dim);
  static ConeDescriptor psd(int side);
  static ConeDescriptor half_soc3();

  // Concatenation of the blocks of *this and other.
  ConeDescriptor product(const ConeDescriptor& other) const;

  int dim() const { return dim_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  const BlockSlice& slice(int i) const { return slices_[static_cast<size_t>(i)]; }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }

  // True when every block is orthant / second-order / PSD.
  bool symmetric() const;

  bool operator==(const ConeDescriptor& other) const;

 private:
  std::vector<Block> blocks_;
  std::vector<BlockSlice> slices_;
  int dim_ = 0;
};

// Scaled symmetric vectorization.  Off-diagonal entries carry a sqrt(2)
// factor so that <svec(X), svec(Y)> = trace(X Y).  Order: column-major upper
// triangle, svec([[a,b],[b,c]]) = (a, sqrt(2) b, c).
Vec svec(const Mat& x, double tol = 1e-12);
Mat smat(const Vec& v);
int svec_len(int side);
int svec_side(int len);

// Signed membership margin: the most violated block constraint.
// x is in the cone iff membership_margin >= 0 (up to tolerance), strictly
// interior iff > 0.  Per block: orthant min(x_i); second-order
// x_last - ||x_rest||; psd lambda_min(smat(x)); half_soc3
// min(x1, x3, x3 - ||(x1,x2)||).
double membership_margin(const ConeDescriptor& cone, const Vec& x);

// Margin of membership in the dual cone.  Identical to membership_margin for
// symmetric blocks; for half_soc3 the dual is SOC3 + cone(e1) and the margin
// maximizes the SOC margin of y - s e1 over s >= 0 (closed form).
double dual_membership_margin(const ConeDescriptor& cone, const Vec& y);

// Same quantity computed by golden-section search over s in [0, ||y||+1].
// Kept as an independent route for the closed form above.
double half_soc3_dual_margin_search(const Vec& y, double tol = 1e-12);

bool contains(const ConeDescriptor& cone, const Vec& x, double tol = kMembershipTol);
bool contains_interior(const ConeDescriptor& cone, const Vec& x, double tol = kInteriorTol);
bool dual_contains(const ConeDescriptor& cone, const Vec& y, double tol = kMembershipTol);

// cone(S) meets the interior of C iff the plain sum of S is interior.
bool conic_hull_meets_interior(const ConeDescriptor& cone, const std::vector<Vec>& s,
                               double tol = kInteriorTol);

// Canonical interior point: all-ones (orthant), unit axis point (SOC),
// identity (PSD), (1, 0, 2) for half_soc3.
Vec canonical_interior_point(const ConeDescriptor& cone);

namespace detail {
void check_dim(const ConeDescriptor& cone, const Vec& x, const char* where);
}

}  // namespace conescale
