// conescale - normalization of factorizations over convex cones
// Copyright 2026 The conescale Authors
// Licensed under Apache 2.0

#include "conescale/recovery.hpp"

#include <Eigen/LU>
#include <cmath>

#include "conescale/sampling.hpp"

namespace conescale {

namespace {

// Greedy pivoted selection of n linearly independent vectors: repeatedly take
// the vector with the largest residual after projecting out the span of the
// already selected ones.
std::vector<int> select_basis(const std::vector<Vec>& vecs, int n, const char* which) {
  if (vecs.empty()) throw PreconditionError(std::string(which) + ": empty set");
  std::vector<Vec> residuals(vecs.begin(), vecs.end());
  double max_norm = 0.0;
  for (const Vec& v : residuals) max_norm = std::max(max_norm, v.norm());
  const double threshold = 1e-10 * std::max(1.0, max_norm);
  std::vector<int> chosen;
  std::vector<Vec> ortho;
  while (static_cast<int>(chosen.size()) < n) {
    int best = -1;
    double best_norm = threshold;
    for (size_t i = 0; i < residuals.size(); ++i) {
      const double r = residuals[i].norm();
      if (r > best_norm) {
        best_norm = r;
        best = static_cast<int>(i);
      }
    }
    if (best < 0)
      throw PreconditionError(std::string(which) + ": spans only rank " +
                              std::to_string(chosen.size()) + " < " + std::to_string(n));
    Vec u = residuals[static_cast<size_t>(best)].normalized();
    ortho.push_back(u);
    chosen.push_back(best);
    for (Vec& r : residuals) r -= u.dot(r) * u;
  }
  return chosen;
}

Mat rows_from(const std::vector<Vec>& vecs, const std::vector<int>& idx) {
  Mat m(static_cast<int>(idx.size()), vecs.front().size());
  for (size_t k = 0; k < idx.size(); ++k)
    m.row(static_cast<int>(k)) = vecs[static_cast<size_t>(idx[k])].transpose();
  return m;
}

}  // namespace

RecoveredMaps recover_linear_maps(const std::vector<Vec>& a, const std::vector<Vec>& a_tilde,
                                  const std::vector<Vec>& b, const std::vector<Vec>& b_tilde) {
  if (a.empty() || b.empty()) throw PreconditionError("recover_linear_maps: empty input");
  if (a.size() != a_tilde.size() || b.size() != b_tilde.size())
    throw PreconditionError("recover_linear_maps: paired sets must have equal sizes");
  const int n = static_cast<int>(a.front().size());
  for (const auto* set : {&a, &a_tilde, &b, &b_tilde})
    for (const Vec& v : *set)
      if (v.size() != n) throw PreconditionError("recover_linear_maps: dimension mismatch");

  double scale = 1.0, violation = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) {
      const double orig = a[i].dot(b[j]);
      violation = std::max(violation, std::abs(orig - a_tilde[i].dot(b_tilde[j])));
      scale = std::max(scale, std::abs(orig));
    }
  if (violation > 1e-9 * scale)
    throw PreconditionError("recover_linear_maps: pairing is inconsistent, max violation " +
                            std::to_string(violation));

  RecoveredMaps out;
  out.basis_b = select_basis(b, n, "recover_linear_maps: B");
  out.basis_a = select_basis(a, n, "recover_linear_maps: A");
  Mat l = rows_from(b, out.basis_b);
  Mat lt = rows_from(b_tilde, out.basis_b);
  Mat r = rows_from(a, out.basis_a);
  Mat rt = rows_from(a_tilde, out.basis_a);
  out.g = lt.fullPivLu().solve(l);
  out.q = rt.fullPivLu().solve(r);

  double residual = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    residual = std::max(residual, (out.g * a[i] - a_tilde[i]).norm() / (1.0 + a_tilde[i].norm()));
  for (size_t j = 0; j < b.size(); ++j)
    residual = std::max(residual, (out.q * b[j] - b_tilde[j]).norm() / (1.0 + b_tilde[j].norm()));
  out.consistency_residual = residual;
  return out;
}

AutomorphismReport verify_automorphism(const ConeDescriptor& cone, const Mat& g, int n_samples,
                                       double tol, std::uint64_t seed) {
  if (g.rows() != cone.dim() || g.cols() != cone.dim())
    throw PreconditionError("verify_automorphism: matrix dimension mismatch");
  Eigen::FullPivLU<Mat> lu(g);
  if (!lu.isInvertible()) throw PreconditionError("verify_automorphism: singular matrix");
  Mat ginv = lu.inverse();

  Rng rng(seed);
  AutomorphismReport rep;
  rep.forward_ok = true;
  rep.inverse_ok = true;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  rep.samples = n_samples;
  for (int k = 0; k < n_samples; ++k) {
    Vec x = (k % 2 == 0) ? sample_boundary_point(cone, rng) : sample_interior_point(cone, rng);
    const double nx = x.norm();
    if (nx > 0.0) x /= nx;
    Vec fwd = g * x;
    Vec bwd = ginv * x;
    const double mf = membership_margin(cone, fwd) / std::max(1.0, fwd.norm());
    const double mb = membership_margin(cone, bwd) / std::max(1.0, bwd.norm());
    if (mf < -tol) rep.forward_ok = false;
    if (mb < -tol) rep.inverse_ok = false;
    rep.worst_margin = std::min({rep.worst_margin, mf, mb});
  }
  return rep;
}

Mat half_soc3_automorphism(int family, double alpha, double beta) {
  if (family != 0 && family != 1)
    throw PreconditionError("half_soc3_automorphism: family must be 0 or 1");
  if (!(alpha > 0.0)) throw PreconditionError("half_soc3_automorphism: alpha must be positive");
  const double c = std::sqrt(beta * beta + 1.0);
  Mat m(3, 3);
  if (family == 0)
    m << 1, 0, 0, 0, c, beta, 0, beta, c;
  else
    m << 1, 0, 0, 0, -c, -beta, 0, beta, c;
  return alpha * m;
}

Mat half_soc3_dual_automorphism(int family, double alpha, double beta) {
  if (family != 0 && family != 1)
    throw PreconditionError("half_soc3_dual_automorphism: family must be 0 or 1");
  if (!(alpha > 0.0))
    throw PreconditionError("half_soc3_dual_automorphism: alpha must be positive");
  const double c = std::sqrt(beta * beta + 1.0);
  Mat m(3, 3);
  if (family == 0)
    m << 1, 0, 0, 0, c, -beta, 0, -beta, c;
  else
    m << 1, 0, 0, 0, -c, -beta, 0, beta, c;
  return (1.0 / alpha) * m;
}

CounterexampleRecord counterexample_search(double m, double beta_lo, double beta_hi,
                                           int grid_size) {
  if (!(m > 0.0)) throw PreconditionError("counterexample_search: M must be positive");
  if (grid_size < 2) throw PreconditionError("counterexample_search: grid must have >= 2 points");
  CounterexampleRecord rec;
  rec.m = m;
  rec.beta_lo = beta_lo;
  rec.beta_hi = beta_hi;
  rec.grid_size = grid_size;
  Vec a(3), b(3);
  a << m, 0.0, m;
  b << -m, 0.0, m;
  rec.delta = a.dot(b);
  rec.analytic_lower = std::sqrt(2.0) * m;
  rec.min_max_norm = std::numeric_limits<double>::infinity();
  for (int fam = 0; fam < 2; ++fam) {
    double best = std::numeric_limits<double>::infinity();
    double best_beta = beta_lo, best_alpha = 1.0;
    for (int k = 0; k < grid_size; ++k) {
      const double beta =
          beta_lo + (beta_hi - beta_lo) * static_cast<double>(k) / (grid_size - 1);
      const double u = (half_soc3_automorphism(fam, 1.0, beta) * a).norm();
      const double v = (half_soc3_dual_automorphism(fam, 1.0, beta) * b).norm();
      const double alpha = std::sqrt(v / u);
      const double value = std::sqrt(u * v);  // max at the balancing alpha
      const double analytic = m * std::sqrt(2.0 + 2.0 * beta * beta);
      rec.max_identity_rel_error =
          std::max(rec.max_identity_rel_error, std::abs(value - analytic) / analytic);
      if (value < best) {
        best = value;
        best_beta = beta;
        best_alpha = alpha;
      }
    }
    rec.family_min[fam] = best;
    rec.best_beta[fam] = best_beta;
    rec.best_alpha[fam] = best_alpha;
    rec.min_max_norm = std::min(rec.min_max_norm, best);
  }
  return rec;
}

}  // namespace conescale
