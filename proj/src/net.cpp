// conescale - normalization of factorizations over convex cones
// Copyright 2026 The conescale Authors
// Licensed under Apache 2.0

#include "conescale/net.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>

namespace conescale {

NetSpec::NetSpec(int n_, double rho_, double eps_) : n(n_), rho(rho_), eps(eps_) {
  if (n < 1) throw PreconditionError("net: dimension must be positive");
  if (!(eps > 0.0)) throw PreconditionError("net: eps must be positive");
  if (!(rho / eps >= static_cast<double>(n)))
    throw PreconditionError("net: hypothesis rho/eps >= n violated");
}

double NetSpec::lattice_spacing() const { return 2.0 * eps / std::sqrt(static_cast<double>(n)); }

double net_cardinality_bound_log2(int n, double rho, double eps) {
  if (n < 3) throw PreconditionError("net_cardinality_bound: requires n >= 3");
  if (!(rho / eps >= static_cast<double>(n)))
    throw PreconditionError("net_cardinality_bound: hypothesis rho/eps >= n violated");
  const double nn = static_cast<double>(n);
  const double factor = std::exp(1.0) * (nn * std::log(nn) + nn * std::log(std::log(nn)) + 5.0 * nn);
  return std::log2(factor) + nn * std::log2(rho / eps);
}

double net_cardinality_bound(int n, double rho, double eps) {
  return std::exp2(net_cardinality_bound_log2(n, rho, eps));
}

Vec round_to_net(const NetSpec& spec, const Vec& u) {
  if (u.size() != spec.n) throw PreconditionError("round_to_net: dimension mismatch");
  if (u.norm() > spec.rho * (1.0 + 1e-12))
    throw PreconditionError("round_to_net: point outside the ball of radius rho");
  const double h = spec.lattice_spacing();
  Vec r(u.size());
  for (int i = 0; i < u.size(); ++i) r[i] = h * std::round(u[i] / h);
  return r;
}

namespace {

void enumerate_rec(const NetSpec& spec, double h, double radius_sq, Vec& point, int coord,
                   double used_sq, std::vector<Vec>& out, std::size_t max_points) {
  if (coord == spec.n) {
    out.push_back(point);
    if (out.size() > max_points)
      throw PreconditionError("enumerate_net: too many net points to enumerate");
    return;
  }
  const double budget = std::sqrt(std::max(0.0, radius_sq - used_sq));
  const int kmax = static_cast<int>(std::floor(budget / h + 1e-12));
  for (int k = -kmax; k <= kmax; ++k) {
    const double v = h * k;
    if (used_sq + v * v > radius_sq * (1.0 + 1e-15)) continue;
    point[coord] = v;
    enumerate_rec(spec, h, radius_sq, point, coord + 1, used_sq + v * v, out, max_points);
  }
}

}  // namespace

std::vector<Vec> enumerate_net(const NetSpec& spec, std::size_t max_points) {
  std::vector<Vec> out;
  Vec point = Vec::Zero(spec.n);
  const double r = spec.rho + spec.eps;
  enumerate_rec(spec, spec.lattice_spacing(), r * r, point, 0, 0.0, out, max_points);
  return out;
}

std::vector<int> max_volume_subsystem(const std::vector<Vec>& rows) {
  if (rows.empty()) throw PreconditionError("max_volume_subsystem: rows must be nonempty");
  const int m = static_cast<int>(rows.size());
  const int dim = static_cast<int>(rows.front().size());
  for (const Vec& r : rows)
    if (r.size() != dim) throw PreconditionError("max_volume_subsystem: dimension mismatch");

  // Greedy pivoted start: largest residual after projecting out the span of
  // the current selection.
  double max_norm = 0.0;
  for (const Vec& r : rows) max_norm = std::max(max_norm, r.norm());
  const double threshold = 1e-10 * std::max(1.0, max_norm);
  std::vector<Vec> residuals(rows.begin(), rows.end());
  std::vector<Vec> ortho;
  std::vector<int> chosen;
  while (true) {
    int best = -1;
    double best_norm = threshold;
    for (int i = 0; i < m; ++i) {
      const double r = residuals[static_cast<size_t>(i)].norm();
      if (r > best_norm) {
        best_norm = r;
        best = i;
      }
    }
    if (best < 0) break;
    Vec u = residuals[static_cast<size_t>(best)].normalized();
    chosen.push_back(best);
    for (Vec& r : residuals) r -= u.dot(r) * u;
  }
  if (chosen.empty()) throw PreconditionError("max_volume_subsystem: rank 0");
  const int rank = static_cast<int>(chosen.size());

  // Local exchange: swap in any row whose expansion coefficient exceeds 1 in
  // magnitude; each swap multiplies the Gram determinant by nu^2 > 1.
  const int cap = 64 * m + 256;
  for (int round = 0; round < cap; ++round) {
    Mat st(dim, rank);
    for (int k = 0; k < rank; ++k) st.col(k) = rows[static_cast<size_t>(chosen[static_cast<size_t>(k)])];
    Eigen::ColPivHouseholderQR<Mat> qr(st);
    int swap_row = -1, swap_pos = -1;
    double best_nu = 1.0 + 1e-12;
    for (int j = 0; j < m; ++j) {
      bool selected = false;
      for (int k = 0; k < rank; ++k)
        if (chosen[static_cast<size_t>(k)] == j) selected = true;
      if (selected) continue;
      Vec nu = qr.solve(rows[static_cast<size_t>(j)]);
      for (int k = 0; k < rank; ++k)
        if (std::abs(nu[k]) > best_nu) {
          best_nu = std::abs(nu[k]);
          swap_row = j;
          swap_pos = k;
        }
    }
    if (swap_row < 0) break;
    chosen[static_cast<size_t>(swap_pos)] = swap_row;
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

EncodedPolytope encode(const Factorization& fac, double m_bound, double f_c,
                       const EncodeOptions& opts) {
  if (fac.ineq_labels.empty() || fac.ineq_labels.size() != fac.b.size())
    throw PreconditionError("encode: factorization must carry one inequality label per B member");
  if (!(m_bound > 0.0) || !(f_c > 0.0))
    throw PreconditionError("encode: M and f_C must be positive");
  const int n = fac.cone.dim();
  const int d = static_cast<int>(fac.ineq_labels.front().size());
  for (const Vec& f : fac.ineq_labels) {
    if (f.size() != d) throw PreconditionError("encode: inequality label dimension mismatch");
    if (f.cwiseAbs().maxCoeff() > m_bound * (1.0 + opts.check_tol))
      throw PreconditionError("encode: hypothesis ||f||_inf <= M violated");
  }
  const double nu = opts.v_inf_bound;
  if (!fac.point_labels.empty()) {
    if (fac.point_labels.size() != fac.a.size())
      throw PreconditionError("encode: point label count mismatch");
    double scale = 1.0;
    for (const Vec& v : fac.point_labels) {
      if (v.size() != d) throw PreconditionError("encode: point label dimension mismatch");
      if (v.cwiseAbs().maxCoeff() > nu * (1.0 + opts.check_tol))
        throw PreconditionError("encode: hypothesis ||v||_inf bound violated");
      scale = std::max(scale, v.norm());
    }
    for (size_t i = 0; i < fac.a.size(); ++i)
      for (size_t j = 0; j < fac.b.size(); ++j) {
        const double sv = fac.point_labels[i].dot(fac.ineq_labels[j]);
        if (sv < -opts.check_tol)
          throw PreconditionError("encode: hypothesis <v, f> >= 0 violated");
        if (std::abs(sv - fac.a[i].dot(fac.b[j])) > opts.check_tol * (1.0 + std::abs(sv)))
          throw PreconditionError("encode: factorization does not reproduce <v, f>");
      }
  }
  const double norm_cap = std::sqrt(d * m_bound * nu) * f_c;
  for (const Vec& a : fac.a)
    if (a.norm() > norm_cap * (1.0 + 1e-9))
      throw PreconditionError("encode: ||a_v|| exceeds sqrt(d M) f_C; normalize first");
  for (const Vec& b : fac.b)
    if (b.norm() > norm_cap * (1.0 + 1e-9))
      throw PreconditionError("encode: ||b_f|| exceeds sqrt(d M) f_C; normalize first");

  EncodedPolytope enc;
  enc.cone = fac.cone;
  enc.d = d;
  enc.n = n;
  enc.m_bound = m_bound;
  enc.f_c = f_c;
  const double dim_factor =
      opts.rho_variant == EncodeOptions::RhoVariant::d_plus_1 ? (d + 1.0) : (n + 1.0);
  enc.rho = std::sqrt(dim_factor * m_bound * nu) * f_c;
  enc.eps = 1.0 / (4.0 * (n + d) * enc.rho);
  enc.delta = 1.0 / (4.0 * (n + d));

  std::vector<Vec> stacked;
  stacked.reserve(fac.b.size());
  for (size_t j = 0; j < fac.b.size(); ++j) {
    Vec row(d + n);
    row.head(d) = fac.ineq_labels[j];
    row.tail(n) = fac.b[j];
    stacked.push_back(std::move(row));
  }
  std::vector<int> sel = max_volume_subsystem(stacked);

  NetSpec spec(n, enc.rho, enc.eps);
  for (int j : sel) {
    enc.f.push_back(fac.ineq_labels[static_cast<size_t>(j)]);
    enc.u.push_back(round_to_net(spec, fac.b[static_cast<size_t>(j)]));
  }
  while (static_cast<int>(enc.f.size()) < n + d) {
    enc.f.push_back(enc.f.back());
    enc.u.push_back(enc.u.back());
  }
  return enc;
}

namespace {

Vec project_cone(const ConeDescriptor& cone, const Vec& y) {
  Vec r(cone.dim());
  for (int i = 0; i < cone.num_blocks(); ++i) {
    const BlockSlice& s = cone.slice(i);
    auto seg = y.segment(s.offset, s.length);
    auto out = r.segment(s.offset, s.length);
    switch (cone.blocks()[static_cast<size_t>(i)].type) {
      case BlockType::orthant:
        out = seg.cwiseMax(0.0);
        break;
      case BlockType::second_order: {
        const int m = s.length;
        const double t = seg[m - 1];
        const double nx = seg.head(m - 1).norm();
        if (t >= nx) {
          out = seg;
        } else if (t <= -nx) {
          out.setZero();
        } else {
          const double c = 0.5 * (1.0 + t / nx);
          out.head(m - 1) = c * seg.head(m - 1);
          out[m - 1] = c * nx;
        }
        break;
      }
      case BlockType::psd: {
        Eigen::SelfAdjointEigenSolver<Mat> es(smat(seg));
        if (es.info() != Eigen::Success)
          throw ConvergenceError("feasibility_check: eigendecomposition failed");
        Vec lam = es.eigenvalues().cwiseMax(0.0);
        out = svec(es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose());
        break;
      }
      case BlockType::half_soc3:
        throw PreconditionError("feasibility_check: half_soc3 cone is not supported");
    }
  }
  return r;
}

// Exact projection onto C intersect B_0(rho): cone projection followed by a
// radial shrink.
Vec project_cone_ball(const ConeDescriptor& cone, double rho, const Vec& y) {
  Vec p = project_cone(cone, y);
  const double n = p.norm();
  if (n > rho) p *= rho / n;
  return p;
}

double slab_excess(const std::vector<Slab>& slabs, const Vec& y, int* worst = nullptr) {
  double v = 0.0;
  for (size_t i = 0; i < slabs.size(); ++i) {
    const double e = std::abs(slabs[i].normal.dot(y) - slabs[i].center) - slabs[i].halfwidth;
    if (e > v) {
      v = e;
      if (worst) *worst = static_cast<int>(i);
    }
  }
  return v;
}

}  // namespace

FeasibilityResult feasibility_check(const ConeDescriptor& cone, double rho,
                                    const std::vector<Slab>& slabs, double tol, int max_iters) {
  if (!(rho > 0.0)) throw PreconditionError("feasibility_check: rho must be positive");
  for (const Slab& s : slabs) {
    detail::check_dim(cone, s.normal, "feasibility_check");
    if (s.halfwidth < 0.0) throw PreconditionError("feasibility_check: negative halfwidth");
  }
  FeasibilityResult res;
  Vec y = Vec::Zero(cone.dim());
  res.witness = y;
  res.violation = slab_excess(slabs, y);
  if (res.violation <= tol) {
    res.feasible = true;
    return res;
  }

  // Alternating projections phase (cyclic over slabs, then cone and ball).
  int it = 0;
  for (; it < max_iters / 2; ++it) {
    for (const Slab& s : slabs) {
      const double sq = s.normal.squaredNorm();
      if (sq <= 0.0) continue;
      const double t = s.normal.dot(y);
      if (t > s.center + s.halfwidth)
        y -= ((t - s.center - s.halfwidth) / sq) * s.normal;
      else if (t < s.center - s.halfwidth)
        y += ((s.center - s.halfwidth - t) / sq) * s.normal;
    }
    y = project_cone_ball(cone, rho, y);
    const double v = slab_excess(slabs, y);
    if (v < res.violation) {
      res.violation = v;
      res.witness = y;
    }
    if (v <= tol) {
      res.feasible = true;
      return res;
    }
  }

  // Projected subgradient on the max slab excess.
  y = res.witness;
  for (; it < max_iters; ++it) {
    int worst = -1;
    const double v = slab_excess(slabs, y, &worst);
    if (v < res.violation) {
      res.violation = v;
      res.witness = y;
    }
    if (v <= tol) {
      res.feasible = true;
      return res;
    }
    if (worst < 0) break;
    const Slab& s = slabs[static_cast<size_t>(worst)];
    const double sq = s.normal.squaredNorm();
    if (sq <= 0.0) break;
    const double sign = (s.normal.dot(y) > s.center) ? 1.0 : -1.0;
    y = project_cone_ball(cone, rho, y - (v / sq) * sign * s.normal);
  }
  res.feasible = res.violation <= tol;
  res.indeterminate = !res.feasible && res.violation <= 2.0 * tol;
  return res;
}

ReconstructionResult reconstruct(const EncodedPolytope& enc, const std::vector<Vec>& candidates) {
  ReconstructionResult out;
  const double tol = enc.delta / 4.0;
  for (const Vec& x : candidates) {
    if (x.size() != enc.d) throw PreconditionError("reconstruct: candidate dimension mismatch");
    std::vector<Slab> slabs;
    slabs.reserve(enc.f.size());
    for (size_t i = 0; i < enc.f.size(); ++i)
      slabs.push_back(Slab{enc.u[i], enc.f[i].dot(x), enc.delta});
    FeasibilityResult r = feasibility_check(enc.cone, enc.rho, slabs, tol);
    if (r.feasible) out.accepted.push_back(x);
    out.any_indeterminate = out.any_indeterminate || r.indeterminate;
    out.details.push_back(std::move(r));
  }
  return out;
}

}  // namespace conescale
