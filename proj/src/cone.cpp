// conescale - normalization of factorizations over convex cones
// Copyright 2026 The conescale Authors
// Licensed under Apache 2.0

#include "conescale/cone.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

namespace conescale {

int Block::ambient_len() const {
  switch (type) {
    case BlockType::orthant:
    case BlockType::second_order:
      return size;
    case BlockType::psd:
      return size * (size + 1) / 2;
    case BlockType::half_soc3:
      return 3;
  }
  return 0;
}

ConeDescriptor::ConeDescriptor(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw PreconditionError("cone: at least one block required");
  int offset = 0;
  for (size_t i = 0; i < blocks_.size(); ++i) {
    const Block& b = blocks_[i];
    switch (b.type) {
      case BlockType::orthant:
        if (b.size < 1) throw PreconditionError("cone: orthant dim must be >= 1");
        break;
      case BlockType::second_order:
        if (b.size < 2) throw PreconditionError("cone: second-order dim must be >= 2");
        break;
      case BlockType::psd:
        if (b.size < 1) throw PreconditionError("cone: psd side must be >= 1");
        break;
      case BlockType::half_soc3:
        if (blocks_.size() != 1)
          throw PreconditionError("cone: half_soc3 must be a standalone single-block cone");
        break;
    }
    BlockSlice s;
    s.block = static_cast<int>(i);
    s.offset = offset;
    s.length = b.ambient_len();
    slices_.push_back(s);
    offset += s.length;
  }
  dim_ = offset;
}

ConeDescriptor ConeDescriptor::orthant(int dim) {
  return ConeDescriptor({Block{BlockType::orthant, dim}});
}
ConeDescriptor ConeDescriptor::second_order(int dim) {
  return ConeDescriptor({Block{BlockType::second_order, dim}});
}
ConeDescriptor ConeDescriptor::psd(int side) {
  return ConeDescriptor({Block{BlockType::psd, side}});
}
ConeDescriptor ConeDescriptor::half_soc3() {
  return ConeDescriptor({Block{BlockType::half_soc3, 3}});
}

ConeDescriptor ConeDescriptor::product(const ConeDescriptor& other) const {
  std::vector<Block> all = blocks_;
  all.insert(all.end(), other.blocks_.begin(), other.blocks_.end());
  return ConeDescriptor(std::move(all));
}

bool ConeDescriptor::symmetric() const {
  for (const Block& b : blocks_)
    if (b.type == BlockType::half_soc3) return false;
  return true;
}

bool ConeDescriptor::operator==(const ConeDescriptor& other) const {
  if (blocks_.size() != other.blocks_.size()) return false;
  for (size_t i = 0; i < blocks_.size(); ++i)
    if (blocks_[i].type != other.blocks_[i].type || blocks_[i].size != other.blocks_[i].size)
      return false;
  return true;
}

namespace detail {
void check_dim(const ConeDescriptor& cone, const Vec& x, const char* where) {
  if (x.size() != cone.dim())
    throw PreconditionError(std::string(where) + ": dimension mismatch, expected " +
                            std::to_string(cone.dim()) + ", got " + std::to_string(x.size()));
}
}  // namespace detail

int svec_len(int side) { return side * (side + 1) / 2; }

int svec_side(int len) {
  int side = static_cast<int>(std::floor(std::sqrt(2.0 * len)));
  for (int k = std::max(1, side - 1); k <= side + 1; ++k)
    if (svec_len(k) == len) return k;
  throw PreconditionError("smat: length " + std::to_string(len) +
                          " is not a triangular number");
}

Vec svec(const Mat& x, double tol) {
  if (x.rows() != x.cols()) throw PreconditionError("svec: matrix must be square");
  const int k = static_cast<int>(x.rows());
  const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  if ((x - x.transpose()).cwiseAbs().maxCoeff() > tol * scale)
    throw PreconditionError("svec: matrix is not symmetric within tolerance");
  Vec v(svec_len(k));
  const double r2 = std::sqrt(2.0);
  int idx = 0;
  for (int j = 0; j < k; ++j)
    for (int i = 0; i <= j; ++i) v[idx++] = (i == j) ? x(i, j) : r2 * 0.5 * (x(i, j) + x(j, i));
  return v;
}

Mat smat(const Vec& v) {
  const int k = svec_side(static_cast<int>(v.size()));
  Mat x(k, k);
  const double inv_r2 = 1.0 / std::sqrt(2.0);
  int idx = 0;
  for (int j = 0; j < k; ++j)
    for (int i = 0; i <= j; ++i) {
      const double val = (i == j) ? v[idx] : inv_r2 * v[idx];
      x(i, j) = val;
      x(j, i) = val;
      ++idx;
    }
  return x;
}

namespace {

double block_margin(const Block& b, const Eigen::Ref<const Vec>& x) {
  switch (b.type) {
    case BlockType::orthant:
      return x.minCoeff();
    case BlockType::second_order: {
      const int m = b.size;
      return x[m - 1] - x.head(m - 1).norm();
    }
    case BlockType::psd: {
      if (b.size == 1) return x[0];
      Eigen::SelfAdjointEigenSolver<Mat> es(smat(x), Eigen::EigenvaluesOnly);
      if (es.info() != Eigen::Success)
        throw ConvergenceError("psd membership: eigendecomposition failed");
      return es.eigenvalues().minCoeff();
    }
    case BlockType::half_soc3:
      return std::min({x[0], x[2], x[2] - std::hypot(x[0], x[1])});
  }
  return 0.0;
}

double half_soc3_dual_margin(const Vec& y) {
  // max over s >= 0 of the SOC margin of y - s e1; the hypot is minimized at
  // s = max(y1, 0).
  const double s = std::max(y[0], 0.0);
  return y[2] - std::hypot(y[0] - s, y[1]);
}

}  // namespace

double half_soc3_dual_margin_search(const Vec& y, double tol) {
  if (y.size() != 3) throw PreconditionError("half_soc3 dual search: need 3 coordinates");
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = y.norm() + 1.0;
  auto margin = [&](double s) { return y[2] - std::hypot(y[0] - s, y[1]); };
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = margin(x1), f2 = margin(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = margin(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = margin(x1);
    }
  }
  return margin(0.5 * (lo + hi));
}

double membership_margin(const ConeDescriptor& cone, const Vec& x) {
  detail::check_dim(cone, x, "membership_margin");
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < cone.num_blocks(); ++i) {
    const BlockSlice& s = cone.slice(i);
    margin = std::min(margin, block_margin(cone.blocks()[static_cast<size_t>(i)],
                                           x.segment(s.offset, s.length)));
  }
  return margin;
}

double dual_membership_margin(const ConeDescriptor& cone, const Vec& y) {
  detail::check_dim(cone, y, "dual_membership_margin");
  if (cone.symmetric()) return membership_margin(cone, y);
  return half_soc3_dual_margin(y);
}

bool contains(const ConeDescriptor& cone, const Vec& x, double tol) {
  return membership_margin(cone, x) >= -tol;
}

bool contains_interior(const ConeDescriptor& cone, const Vec& x, double tol) {
  return membership_margin(cone, x) > tol;
}

bool dual_contains(const ConeDescriptor& cone, const Vec& y, double tol) {
  return dual_membership_margin(cone, y) >= -tol;
}

bool conic_hull_meets_interior(const ConeDescriptor& cone, const std::vector<Vec>& s,
                               double tol) {
  if (s.empty()) throw PreconditionError("conic_hull_meets_interior: empty set");
  Vec sum = Vec::Zero(cone.dim());
  for (const Vec& x : s) {
    detail::check_dim(cone, x, "conic_hull_meets_interior");
    sum += x;
  }
  return contains_interior(cone, sum, tol);
}

Vec canonical_interior_point(const ConeDescriptor& cone) {
  Vec w = Vec::Zero(cone.dim());
  for (int i = 0; i < cone.num_blocks(); ++i) {
    const BlockSlice& s = cone.slice(i);
    const Block& b = cone.blocks()[static_cast<size_t>(i)];
    switch (b.type) {
      case BlockType::orthant:
        w.segment(s.offset, s.length).setOnes();
        break;
      case BlockType::second_order:
        w[s.offset + s.length - 1] = 1.0;
        break;
      case BlockType::psd:
        w.segment(s.offset, s.length) = svec(Mat::Identity(b.size, b.size));
        break;
      case BlockType::half_soc3:
        w[s.offset] = 1.0;
        w[s.offset + 2] = 2.0;
        break;
    }
  }
  return w;
}

}  // namespace conescale
