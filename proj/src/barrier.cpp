// conescale - normalization of factorizations over convex cones
// Copyright 2026 The conescale Authors
// Licensed under Apache 2.0

#include "conescale/barrier.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

namespace conescale {

namespace {

constexpr double kEigFloorRel = 1e-14;

// Second-order block helpers.  With J = diag(-I, 1) and s(x) = x' J x, the
// barrier is -log s and
//   grad   = -2 J x / s
//   hess h = -(2/s) J h + (4/s^2) <Jx, h> Jx
//   inv  h = -(s/2) J h + <x, h> x
Vec soc_jmul(const Eigen::Ref<const Vec>& x) {
  Vec y = -x;
  y[y.size() - 1] = x[x.size() - 1];
  return y;
}

double soc_residual(const Eigen::Ref<const Vec>& x) {
  const int m = static_cast<int>(x.size());
  return x[m - 1] * x[m - 1] - x.head(m - 1).squaredNorm();
}

Mat soc_hessian_dense(const Eigen::Ref<const Vec>& x, double s) {
  const int m = static_cast<int>(x.size());
  Mat j = -Mat::Identity(m, m);
  j(m - 1, m - 1) = 1.0;
  Vec u = soc_jmul(x);
  return (-2.0 / s) * j + (4.0 / (s * s)) * (u * u.transpose());
}

}  // namespace

int theta(const ConeDescriptor& cone) {
  int total = 0;
  for (const Block& b : cone.blocks()) {
    switch (b.type) {
      case BlockType::orthant:
        total += b.size;
        break;
      case BlockType::second_order:
        total += 2;
        break;
      case BlockType::psd:
        total += b.size;
        break;
      case BlockType::half_soc3:
        throw PreconditionError("theta: half_soc3 has no self-scaled barrier");
    }
  }
  return total;
}

BarrierPoint::BarrierPoint(ConeDescriptor cone, Vec x, double interior_tol)
    : cone_(std::move(cone)), x_(std::move(x)) {
  if (!cone_.symmetric())
    throw PreconditionError("barrier: half_soc3 has no self-scaled barrier");
  detail::check_dim(cone_, x_, "barrier");
  if (!contains_interior(cone_, x_, interior_tol))
    throw PreconditionError("barrier: point is not strictly interior");
  for (int i = 0; i < cone_.num_blocks(); ++i) {
    const BlockSlice& s = cone_.slice(i);
    const Block& b = cone_.blocks()[static_cast<size_t>(i)];
    auto seg = x_.segment(s.offset, s.length);
    switch (b.type) {
      case BlockType::orthant:
        cache_.emplace_back(OrthantCache{seg.cwiseInverse()});
        break;
      case BlockType::second_order:
        cache_.emplace_back(SocCache{soc_residual(seg)});
        break;
      case BlockType::psd: {
        Eigen::SelfAdjointEigenSolver<Mat> es(smat(seg));
        if (es.info() != Eigen::Success)
          throw ConvergenceError("barrier: psd eigendecomposition failed");
        Vec lam = es.eigenvalues();
        const double floor = kEigFloorRel * lam.maxCoeff();
        for (int k = 0; k < lam.size(); ++k) lam[k] = std::max(lam[k], floor);
        cache_.emplace_back(PsdCache{es.eigenvectors(), lam});
        break;
      }
      case BlockType::half_soc3:
        break;  // unreachable, rejected above
    }
  }
}

double BarrierPoint::value() const {
  double total = 0.0;
  for (int i = 0; i < cone_.num_blocks(); ++i) {
    const BlockSlice& s = cone_.slice(i);
    switch (cone_.blocks()[static_cast<size_t>(i)].type) {
      case BlockType::orthant:
        total -= x_.segment(s.offset, s.length).array().log().sum();
        break;
      case BlockType::second_order:
        total -= std::log(std::get<SocCache>(cache_[static_cast<size_t>(i)]).s);
        break;
      case BlockType::psd:
        total -= std::get<PsdCache>(cache_[static_cast<size_t>(i)])
                     .values.array()
                     .log()
                     .sum();
        break;
      case BlockType::half_soc3:
        break;
    }
  }
  return total;
}

Vec BarrierPoint::gradient() const {
  Vec g(cone_.dim());
  for (int i = 0; i < cone_.num_blocks(); ++i) {
    const BlockSlice& s = cone_.slice(i);
    auto seg = x_.segment(s.offset, s.length);
    auto out = g.segment(s.offset, s.length);
    switch (cone_.blocks()[static_cast<size_t>(i)].type) {
      case BlockType::orthant:
        out = -std::get<OrthantCache>(cache_[static_cast<size_t>(i)]).inv;
        break;
      case BlockType::second_order: {
        const double sres = std::get<SocCache>(cache_[static_cast<size_t>(i)]).s;
        out = (-2.0 / sres) * soc_jmul(seg);
        break;
      }
      case BlockType::psd: {
        const PsdCache& c = std::get<PsdCache>(cache_[static_cast<size_t>(i)]);
        Mat xinv = c.vectors * c.values.cwiseInverse().asDiagonal() * c.vectors.transpose();
        out = -svec(xinv);
        break;
      }
      case BlockType::half_soc3:
        break;
    }
  }
  return g;
}

Vec BarrierPoint::hessian_apply(const Vec& h) const {
  detail::check_dim(cone_, h, "hessian_apply");
  Vec r(cone_.dim());
  for (int i = 0; i < cone_.num_blocks(); ++i) {
    const BlockSlice& s = cone_.slice(i);
    auto xseg = x_.segment(s.offset, s.length);
    auto hseg = h.segment(s.offset, s.length);
    auto out = r.segment(s.offset, s.length);
    switch (cone_.blocks()[static_cast<size_t>(i)].type) {
      case BlockType::orthant: {
        const Vec& inv = std::get<OrthantCache>(cache_[static_cast<size_t>(i)]).inv;
        out = hseg.cwiseProduct(inv).cwiseProduct(inv);
        break;
      }
      case BlockType::second_order: {
        const double sres = std::get<SocCache>(cache_[static_cast<size_t>(i)]).s;
        Vec u = soc_jmul(xseg);
        Vec jh = soc_jmul(hseg);
        out = (-2.0 / sres) * jh + (4.0 / (sres * sres)) * u.dot(hseg) * u;
        break;
      }
      case BlockType::psd: {
        const PsdCache& c = std::get<PsdCache>(cache_[static_cast<size_t>(i)]);
        Mat xinv = c.vectors * c.values.cwiseInverse().asDiagonal() * c.vectors.transpose();
        out = svec(xinv * smat(hseg) * xinv);
        break;
      }
      case BlockType::half_soc3:
        break;
    }
  }
  return r;
}

Vec BarrierPoint::hessian_inverse_apply(const Vec& h) const {
  detail::check_dim(cone_, h, "hessian_inverse_apply");
  Vec r(cone_.dim());
  for (int i = 0; i < cone_.num_blocks(); ++i) {
    const BlockSlice& s = cone_.slice(i);
    auto xseg = x_.segment(s.offset, s.length);
    auto hseg = h.segment(s.offset, s.length);
    auto out = r.segment(s.offset, s.length);
    switch (cone_.blocks()[static_cast<size_t>(i)].type) {
      case BlockType::orthant: {
        out = hseg.cwiseProduct(xseg).cwiseProduct(xseg);
        break;
      }
      case BlockType::second_order: {
        const double sres = std::get<SocCache>(cache_[static_cast<size_t>(i)]).s;
        out = (-sres / 2.0) * soc_jmul(hseg) + xseg.dot(hseg) * xseg;
        break;
      }
      case BlockType::psd: {
        const PsdCache& c = std::get<PsdCache>(cache_[static_cast<size_t>(i)]);
        Mat x = c.vectors * c.values.asDiagonal() * c.vectors.transpose();
        out = svec(x * smat(hseg) * x);
        break;
      }
      case BlockType::half_soc3:
        break;
    }
  }
  return r;
}

ScalingOperator BarrierPoint::hessian_sqrt() const {
  ScalingOperator op;
  op.cone_ = cone_;
  for (int i = 0; i < cone_.num_blocks(); ++i) {
    const BlockSlice& s = cone_.slice(i);
    auto xseg = x_.segment(s.offset, s.length);
    ScalingOperator::BlockOp blk;
    blk.type = cone_.blocks()[static_cast<size_t>(i)].type;
    switch (blk.type) {
      case BlockType::orthant:
        blk.diag = std::get<OrthantCache>(cache_[static_cast<size_t>(i)]).inv;
        break;
      case BlockType::second_order: {
        const double sres = std::get<SocCache>(cache_[static_cast<size_t>(i)]).s;
        Eigen::SelfAdjointEigenSolver<Mat> es(soc_hessian_dense(xseg, sres));
        if (es.info() != Eigen::Success)
          throw ConvergenceError("hessian_sqrt: soc eigendecomposition failed");
        Vec lam = es.eigenvalues();
        const double floor = kEigFloorRel * lam.maxCoeff();
        for (int k = 0; k < lam.size(); ++k) lam[k] = std::max(lam[k], floor);
        blk.fwd = es.eigenvectors() * lam.cwiseSqrt().asDiagonal() *
                  es.eigenvectors().transpose();
        blk.inv = es.eigenvectors() * lam.cwiseSqrt().cwiseInverse().asDiagonal() *
                  es.eigenvectors().transpose();
        break;
      }
      case BlockType::psd: {
        const PsdCache& c = std::get<PsdCache>(cache_[static_cast<size_t>(i)]);
        blk.fwd = c.vectors * c.values.cwiseSqrt().cwiseInverse().asDiagonal() *
                  c.vectors.transpose();
        blk.inv = c.vectors * c.values.cwiseSqrt().asDiagonal() * c.vectors.transpose();
        break;
      }
      case BlockType::half_soc3:
        break;
    }
    op.blocks_.push_back(std::move(blk));
  }
  return op;
}

double BarrierPoint::max_feasible_step(const Vec& d) const {
  detail::check_dim(cone_, d, "max_feasible_step");
  double alpha = std::numeric_limits<double>::infinity();
  for (int i = 0; i < cone_.num_blocks(); ++i) {
    const BlockSlice& s = cone_.slice(i);
    auto xseg = x_.segment(s.offset, s.length);
    auto dseg = d.segment(s.offset, s.length);
    switch (cone_.blocks()[static_cast<size_t>(i)].type) {
      case BlockType::orthant: {
        for (int k = 0; k < s.length; ++k)
          if (dseg[k] < 0.0) alpha = std::min(alpha, -xseg[k] / dseg[k]);
        break;
      }
      case BlockType::second_order: {
        // smallest positive root of s(x + a d) = s_x + 2 a <Jx,d> + a^2 s_d,
        // plus the axis-positivity constraint.
        const int m = s.length;
        const double sx = std::get<SocCache>(cache_[static_cast<size_t>(i)]).s;
        const double beta = soc_jmul(xseg).dot(dseg);
        const double gamma = soc_residual(dseg);
        const double disc = beta * beta - gamma * sx;
        if (disc >= 0.0) {
          const double sq = std::sqrt(disc);
          // roots of gamma a^2 + 2 beta a + sx = 0
          if (gamma != 0.0) {
            const double r1 = (-beta - sq) / gamma;
            const double r2 = (-beta + sq) / gamma;
            if (r1 > 0.0) alpha = std::min(alpha, r1);
            if (r2 > 0.0) alpha = std::min(alpha, r2);
          } else if (beta < 0.0) {
            alpha = std::min(alpha, -sx / (2.0 * beta));
          }
        }
        if (dseg[m - 1] < 0.0) alpha = std::min(alpha, -xseg[m - 1] / dseg[m - 1]);
        break;
      }
      case BlockType::psd: {
        const PsdCache& c = std::get<PsdCache>(cache_[static_cast<size_t>(i)]);
        Mat sqrt_inv = c.vectors * c.values.cwiseSqrt().cwiseInverse().asDiagonal() *
                       c.vectors.transpose();
        Mat m = sqrt_inv * smat(dseg) * sqrt_inv;
        Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
        const double lam_min = es.eigenvalues().minCoeff();
        if (lam_min < 0.0) alpha = std::min(alpha, -1.0 / lam_min);
        break;
      }
      case BlockType::half_soc3:
        break;
    }
  }
  return alpha;
}

Vec ScalingOperator::apply(const Vec& h) const {
  detail::check_dim(cone_, h, "scaling apply");
  Vec r(cone_.dim());
  for (int i = 0; i < cone_.num_blocks(); ++i) {
    const BlockSlice& s = cone_.slice(i);
    auto hseg = h.segment(s.offset, s.length);
    auto out = r.segment(s.offset, s.length);
    const BlockOp& blk = blocks_[static_cast<size_t>(i)];
    switch (blk.type) {
      case BlockType::orthant:
        out = hseg.cwiseProduct(blk.diag);
        break;
      case BlockType::second_order:
        out = blk.fwd * hseg;
        break;
      case BlockType::psd:
        out = svec(blk.fwd * smat(hseg) * blk.fwd);
        break;
      case BlockType::half_soc3:
        break;
    }
  }
  return r;
}

Vec ScalingOperator::inverse_apply(const Vec& h) const {
  detail::check_dim(cone_, h, "scaling inverse apply");
  Vec r(cone_.dim());
  for (int i = 0; i < cone_.num_blocks(); ++i) {
    const BlockSlice& s = cone_.slice(i);
    auto hseg = h.segment(s.offset, s.length);
    auto out = r.segment(s.offset, s.length);
    const BlockOp& blk = blocks_[static_cast<size_t>(i)];
    switch (blk.type) {
      case BlockType::orthant:
        out = hseg.cwiseQuotient(blk.diag);
        break;
      case BlockType::second_order:
        out = blk.inv * hseg;
        break;
      case BlockType::psd:
        out = svec(blk.inv * smat(hseg) * blk.inv);
        break;
      case BlockType::half_soc3:
        break;
    }
  }
  return r;
}

Mat ScalingOperator::dense() const {
  const int n = cone_.dim();
  Mat m(n, n);
  Vec e = Vec::Zero(n);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    m.col(j) = apply(e);
    e[j] = 0.0;
  }
  return m;
}

ScalingOperator ScalingOperator::concat(const std::vector<ScalingOperator>& parts) {
  if (parts.empty()) throw PreconditionError("ScalingOperator::concat: empty");
  ScalingOperator op;
  ConeDescriptor cone = parts.front().cone_;
  op.blocks_ = parts.front().blocks_;
  for (size_t i = 1; i < parts.size(); ++i) {
    cone = cone.product(parts[i].cone_);
    op.blocks_.insert(op.blocks_.end(), parts[i].blocks_.begin(), parts[i].blocks_.end());
  }
  op.cone_ = cone;
  return op;
}

Mat ScalingOperator::inverse_dense() const {
  const int n = cone_.dim();
  Mat m(n, n);
  Vec e = Vec::Zero(n);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    m.col(j) = inverse_apply(e);
    e[j] = 0.0;
  }
  return m;
}

Vec conjugate_gradient_map(const BarrierPoint& p) {
  Vec y = -p.gradient();
  BarrierPoint q(p.cone(), y);
  return -q.gradient();
}

}  // namespace conescale
