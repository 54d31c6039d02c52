// conescale - normalization of factorizations over convex cones
// Copyright 2026 The conescale Authors
// Licensed under Apache 2.0

#include "conescale/scaling.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace conescale {

namespace {

// ---------------------------------------------------------------------------
// Simplex-constrained least squares: min ||M x|| s.t. sum x = 1, x >= 0.
// Primal active-set method; the equality-constrained subproblems are solved
// in a null-space parametrization by QR, so no regularization is needed.
// ---------------------------------------------------------------------------

Vec equality_solve(const Mat& m, const std::vector<int>& free_idx) {
  const int nf = static_cast<int>(free_idx.size());
  if (nf == 1) {
    Vec x(1);
    x[0] = 1.0;
    return x;
  }
  Mat mf(m.rows(), nf);
  for (int k = 0; k < nf; ++k) mf.col(k) = m.col(free_idx[static_cast<size_t>(k)]);
  // x = x0 + Z y with x0 uniform and Z spanning { z : sum z = 0 }.
  Mat z = Mat::Zero(nf, nf - 1);
  for (int k = 0; k < nf - 1; ++k) {
    z(k, k) = 1.0;
    z(nf - 1, k) = -1.0;
  }
  Vec x0 = Vec::Constant(nf, 1.0 / nf);
  Mat mz = mf * z;
  Vec rhs = -(mf * x0);
  Vec y = mz.colPivHouseholderQr().solve(rhs);
  return x0 + z * y;
}

Vec simplex_least_squares(const Mat& m, Vec x) {
  const int p = static_cast<int>(m.cols());
  if (p == 0) throw PreconditionError("simplex_least_squares: no columns");
  // Feasible start.
  double total = 0.0;
  for (int i = 0; i < p; ++i) {
    if (!(x[i] > 0.0)) x[i] = 0.0;
    total += x[i];
  }
  if (total <= 1e-300)
    x = Vec::Constant(p, 1.0 / p);
  else
    x /= total;

  std::vector<bool> active(static_cast<size_t>(p));
  for (int i = 0; i < p; ++i) active[static_cast<size_t>(i)] = (x[i] == 0.0);

  const int max_rounds = 50 + 6 * p * p;
  for (int round = 0; round < max_rounds; ++round) {
    std::vector<int> free_idx;
    for (int i = 0; i < p; ++i)
      if (!active[static_cast<size_t>(i)]) free_idx.push_back(i);
    if (free_idx.empty()) {
      // all pinned at zero cannot sum to one; release the best column
      Vec g = m.transpose() * (m * x);
      int best = 0;
      for (int i = 1; i < p; ++i)
        if (g[i] < g[best]) best = i;
      active[static_cast<size_t>(best)] = false;
      continue;
    }
    Vec xf = equality_solve(m, free_idx);
    double min_free = xf.minCoeff();
    if (min_free >= -1e-12) {
      Vec xn = Vec::Zero(p);
      for (size_t k = 0; k < free_idx.size(); ++k)
        xn[free_idx[k]] = std::max(0.0, xf[static_cast<int>(k)]);
      xn /= xn.sum();
      x = xn;
      Vec g = m.transpose() * (m * x);
      double nu = 0.0;
      for (int i : free_idx) nu += g[i];
      nu /= static_cast<double>(free_idx.size());
      const double dual_tol = 1e-11 * std::max(1.0, g.cwiseAbs().maxCoeff());
      int worst = -1;
      double worst_val = -dual_tol;
      for (int i = 0; i < p; ++i)
        if (active[static_cast<size_t>(i)] && g[i] - nu < worst_val) {
          worst_val = g[i] - nu;
          worst = i;
        }
      if (worst < 0) return x;
      active[static_cast<size_t>(worst)] = false;
    } else {
      // Step toward xf until a nonnegativity bound blocks.
      double step = 1.0;
      int blocking = -1;
      for (size_t k = 0; k < free_idx.size(); ++k) {
        const double xi = x[free_idx[k]];
        const double xt = xf[static_cast<int>(k)];
        if (xt < 0.0 && xi - xt > 0.0) {
          const double s = xi / (xi - xt);
          if (s < step) {
            step = s;
            blocking = free_idx[k];
          }
        }
      }
      for (size_t k = 0; k < free_idx.size(); ++k) {
        const int i = free_idx[k];
        x[i] = x[i] + step * (xf[static_cast<int>(k)] - x[i]);
        if (x[i] < 0.0) x[i] = 0.0;
      }
      if (blocking >= 0) {
        x[blocking] = 0.0;
        active[static_cast<size_t>(blocking)] = true;
      }
      x /= x.sum();
    }
  }
  return x;  // iteration cap; the returned residual is still honest
}

// Constraint values of SYM1 at w: first |A| entries <-grad F(w), a>, then
// |B| entries <w, b>.
Vec constraint_values(const BarrierPoint& p, const std::vector<Vec>& a,
                      const std::vector<Vec>& b) {
  Vec ng = -p.gradient();
  Vec v(static_cast<int>(a.size() + b.size()));
  int k = 0;
  for (const Vec& ai : a) v[k++] = ng.dot(ai);
  for (const Vec& bi : b) v[k++] = p.x().dot(bi);
  return v;
}

struct SmoothEval {
  double value = 0.0;     // smoothed objective
  double objective = 0.0;  // true max
  Vec grad;
  Vec softmax;
  Vec values;
};

SmoothEval eval_smooth(const ConeDescriptor& cone, const std::vector<Vec>& a,
                       const std::vector<Vec>& b, const Vec& w, double eta) {
  BarrierPoint p(cone, w);
  SmoothEval e;
  e.values = constraint_values(p, a, b);
  e.objective = e.values.maxCoeff();
  const int m = static_cast<int>(e.values.size());
  Vec ex(m);
  double z = 0.0;
  for (int k = 0; k < m; ++k) {
    ex[k] = std::exp((e.values[k] - e.objective) / eta);
    z += ex[k];
  }
  e.value = e.objective + eta * std::log(z);
  e.softmax = ex / z;
  e.grad = Vec::Zero(cone.dim());
  const int m1 = static_cast<int>(a.size());
  for (int k = 0; k < m1; ++k)
    if (e.softmax[k] > 1e-300) e.grad -= e.softmax[k] * p.hessian_apply(a[static_cast<size_t>(k)]);
  for (int k = 0; k < static_cast<int>(b.size()); ++k)
    if (e.softmax[m1 + k] > 1e-300) e.grad += e.softmax[m1 + k] * b[static_cast<size_t>(k)];
  return e;
}

// One smoothing stage: BFGS with an interior line search (step capped at
// 0.99 of the distance to the boundary, then backtracking).
struct StageResult {
  Vec w;
  SmoothEval eval;
  int iterations = 0;
};

StageResult bfgs_stage(const ConeDescriptor& cone, const std::vector<Vec>& a,
                       const std::vector<Vec>& b, Vec w, double eta, double grad_tol,
                       int iter_cap, bool debug) {
  const int n = cone.dim();
  Mat h = Mat::Identity(n, n);
  SmoothEval e = eval_smooth(cone, a, b, w, eta);
  int it = 0;
  for (; it < iter_cap; ++it) {
    if (e.grad.norm() <= grad_tol) break;
    Vec d = -(h * e.grad);
    double gd = e.grad.dot(d);
    if (!(gd < -1e-14 * d.norm() * e.grad.norm())) {
      h = Mat::Identity(n, n);
      d = -e.grad;
      gd = -e.grad.squaredNorm();
    }
    BarrierPoint p(cone, w);
    const double to_boundary = p.max_feasible_step(d);
    double alpha = std::min(1.0, 0.99 * to_boundary);
    if (!(alpha > 0.0)) break;
    SmoothEval trial;
    bool accepted = false;
    while (alpha > 1e-20) {
      Vec wt = w + alpha * d;
      if (contains_interior(cone, wt, 0.0)) {
        trial = eval_smooth(cone, a, b, wt, eta);
        if (trial.value <= e.value + 1e-4 * alpha * gd) {
          accepted = true;
          w = wt;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
    if (debug && trial.value > e.value + 1e-12 * (1.0 + std::abs(e.value)))
      throw std::logic_error("sym1 debug: smoothed objective increased");
    Vec s = alpha * d;
    Vec y = trial.grad - e.grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      Mat iv = Mat::Identity(n, n) - rho * (s * y.transpose());
      h = iv * h * iv.transpose() + rho * (s * s.transpose());
    }
    e = trial;
  }
  return {w, e, it};
}

double balance_initial_point(const ConeDescriptor& cone, const std::vector<Vec>& a,
                             const std::vector<Vec>& b, Vec& w) {
  BarrierPoint p(cone, w);
  Vec ng = -p.gradient();
  double pa = 0.0, qb = 0.0;
  for (const Vec& ai : a) pa = std::max(pa, ng.dot(ai));
  for (const Vec& bi : b) qb = std::max(qb, w.dot(bi));
  if (pa > 0.0 && qb > 0.0) {
    const double s = std::sqrt(pa / qb);
    w *= s;
    return std::max(pa, qb) / std::max(s, 1.0 / s);
  }
  return std::max(pa, qb);
}

}  // namespace

double max_pairing(const Factorization& fac) {
  if (fac.a.empty() || fac.b.empty())
    throw PreconditionError("factorization: A and B must be nonempty");
  double delta = 0.0;
  for (const Vec& a : fac.a)
    for (const Vec& b : fac.b) delta = std::max(delta, a.dot(b));
  return delta;
}

void validate_factorization(const Factorization& fac, double tol) {
  for (size_t i = 0; i < fac.a.size(); ++i) {
    const Vec& a = fac.a[i];
    detail::check_dim(fac.cone, a, "factorization A");
    if (!contains(fac.cone, a, tol * (1.0 + a.norm())))
      throw PreconditionError("factorization: A[" + std::to_string(i) +
                              "] is not a member of the cone");
  }
  for (size_t i = 0; i < fac.b.size(); ++i) {
    const Vec& b = fac.b[i];
    detail::check_dim(fac.cone, b, "factorization B");
    if (!dual_contains(fac.cone, b, tol * (1.0 + b.norm())))
      throw PreconditionError("factorization: B[" + std::to_string(i) +
                              "] is not a member of the dual cone");
  }
  if (!fac.point_labels.empty() && fac.point_labels.size() != fac.a.size())
    throw PreconditionError("factorization: point label count mismatch");
  if (!fac.ineq_labels.empty() && fac.ineq_labels.size() != fac.b.size())
    throw PreconditionError("factorization: inequality label count mismatch");
}

KktResult kkt_residual(const Factorization& fac, const Vec& w, double t, double active_tol,
                       const std::optional<Vec>& seed_weights) {
  BarrierPoint p(fac.cone, w);
  Vec values = constraint_values(p, fac.a, fac.b);
  const int m1 = static_cast<int>(fac.a.size());
  const int m2 = static_cast<int>(fac.b.size());
  const double thr = active_tol * (1.0 + std::abs(t));
  std::vector<int> act;
  int argmax = 0;
  for (int k = 1; k < m1 + m2; ++k)
    if (values[k] > values[argmax]) argmax = k;
  for (int k = 0; k < m1 + m2; ++k)
    if (t - values[k] <= thr || k == argmax) act.push_back(k);

  Mat m(fac.cone.dim(), static_cast<int>(act.size()));
  for (size_t c = 0; c < act.size(); ++c) {
    const int k = act[c];
    if (k < m1)
      m.col(static_cast<int>(c)) = p.hessian_apply(fac.a[static_cast<size_t>(k)]);
    else
      m.col(static_cast<int>(c)) = -fac.b[static_cast<size_t>(k - m1)];
  }
  Vec x0 = Vec::Constant(static_cast<int>(act.size()), 1.0 / static_cast<double>(act.size()));
  if (seed_weights && seed_weights->size() == m1 + m2) {
    for (size_t c = 0; c < act.size(); ++c) x0[static_cast<int>(c)] = (*seed_weights)[act[c]];
  }
  Vec x = simplex_least_squares(m, x0);

  KktResult res;
  res.residual = (m * x).norm();
  res.lambda = Vec::Zero(m1);
  res.mu = Vec::Zero(m2);
  for (size_t c = 0; c < act.size(); ++c) {
    const int k = act[c];
    if (k < m1)
      res.lambda[k] = x[static_cast<int>(c)];
    else
      res.mu[k - m1] = x[static_cast<int>(c)];
  }
  res.complementarity_violation = 0.0;
  for (int k = 0; k < m1; ++k)
    res.complementarity_violation += res.lambda[k] * std::abs(t - values[k]);
  for (int k = 0; k < m2; ++k)
    res.complementarity_violation += res.mu[k] * std::abs(t - values[m1 + k]);
  return res;
}

Sym1Solution solve_sym1(const Factorization& fac, const SolveOptions& opts) {
  if (!fac.cone.symmetric())
    throw PreconditionError("solve_sym1: cone must be symmetric (no half_soc3 block)");
  validate_factorization(fac);
  if (!conic_hull_meets_interior(fac.cone, fac.a))
    throw PreconditionError("solve_sym1: cone(A) does not intersect the interior of C");
  if (!conic_hull_meets_interior(fac.cone, fac.b))
    throw PreconditionError("solve_sym1: cone(B) does not intersect the interior of C*");
  const double delta = max_pairing(fac);
  if (!(delta > 0.0))
    throw PreconditionError("solve_sym1: delta = 0; use the epsilon-scaling special case");

  const ConeDescriptor& cone = fac.cone;
  const int th = theta(cone);

  // Internal rescaling: divide both sets by sqrt(delta) (same minimizer,
  // objective scales) and balance the two sets by a factor c (minimizer
  // scales by c, objective unchanged).
  const double sd = std::sqrt(delta);
  double max_a = 0.0, max_b = 0.0;
  for (const Vec& v : fac.a) max_a = std::max(max_a, v.norm());
  for (const Vec& v : fac.b) max_b = std::max(max_b, v.norm());
  const double c = std::clamp(std::sqrt(max_b / max_a), 1e-6, 1e6);
  std::vector<Vec> a2, b2;
  a2.reserve(fac.a.size());
  b2.reserve(fac.b.size());
  for (const Vec& v : fac.a) a2.push_back((c / sd) * v);
  for (const Vec& v : fac.b) b2.push_back(v / (c * sd));

  Vec w = Vec::Zero(cone.dim());
  for (const Vec& v : a2) w += v;
  if (membership_margin(cone, w) <= 1e-8 * (1.0 + w.norm()))
    w += (1e-6 * w.norm() + 1e-10) * canonical_interior_point(cone);
  double t0 = balance_initial_point(cone, a2, b2, w);
  if (!(t0 > 0.0)) t0 = 1.0;

  const double eta_min = opts.tol * std::max(1.0, t0);
  double eta = 0.1 * t0;
  int total_iters = 0;
  SmoothEval eval = eval_smooth(cone, a2, b2, w, eta);

  auto run_schedule = [&](double eta_floor) {
    while (true) {
      const double grad_tol = std::max(1e-10, 1e-2 * eta);
      const int cap = std::min(400, opts.max_iters - total_iters);
      if (cap <= 0) break;
      StageResult st = bfgs_stage(cone, a2, b2, w, eta, grad_tol, cap, opts.debug);
      w = st.w;
      eval = st.eval;
      total_iters += st.iterations;
      if (eta <= eta_floor) break;
      eta = std::max(eta * 0.5, eta_floor);
    }
  };
  run_schedule(eta_min);

  auto finish = [&]() {
    Sym1Solution sol;
    sol.w = w / c;
    BarrierPoint p(cone, sol.w);
    Vec values = constraint_values(p, fac.a, fac.b);
    sol.t = values.maxCoeff();
    Vec seed(static_cast<int>(fac.a.size() + fac.b.size()));
    for (int k = 0; k < seed.size(); ++k) seed[k] = eval.softmax[k];
    KktResult kkt = kkt_residual(fac, sol.w, sol.t, opts.active_tol, seed);
    sol.lambda = kkt.lambda;
    sol.mu = kkt.mu;
    sol.kkt_residual = kkt.residual;
    sol.complementarity_violation = kkt.complementarity_violation;
    sol.iterations = total_iters;
    return sol;
  };

  Sym1Solution sol = finish();
  // A-posteriori certification loop: sharpen the smoothing until the KKT
  // residual and the theorem bound check out (both hold at the optimum).
  const double kkt_target = opts.kkt_tol * (1.0 + delta);
  const double bound_target = th * delta * (1.0 + 1e-6);
  int extra = 0;
  while ((sol.kkt_residual > kkt_target || sol.t * sol.t > bound_target) && extra < 24 &&
         total_iters < opts.max_iters) {
    eta *= 0.5;
    run_schedule(eta);
    sol = finish();
    ++extra;
  }
  if (sol.kkt_residual > kkt_target || sol.t * sol.t > bound_target)
    throw ConvergenceError(
        "solve_sym1: failed to certify optimality within iteration budget (best t = " +
            std::to_string(sol.t) + ", kkt residual = " + std::to_string(sol.kkt_residual) + ")",
        sol.t);
  return sol;
}

double evaluate_sym2(const ConeDescriptor& cone, const Vec& w, const std::vector<Vec>& a,
                     const std::vector<Vec>& b) {
  BarrierPoint p(cone, w);
  double tau = 0.0;
  for (const Vec& ai : a) tau = std::max(tau, p.hessian_apply(ai).dot(ai));
  for (const Vec& bi : b) tau = std::max(tau, p.hessian_inverse_apply(bi).dot(bi));
  return tau;
}

namespace {

Mat psd_sqrt_of(const Mat& x) {
  Eigen::SelfAdjointEigenSolver<Mat> es(x);
  if (es.info() != Eigen::Success)
    throw ConvergenceError("nt_scaling_point: eigendecomposition failed");
  Vec lam = es.eigenvalues();
  const double floor = 1e-14 * std::max(0.0, lam.maxCoeff());
  for (int i = 0; i < lam.size(); ++i) lam[i] = std::max(lam[i], floor);
  return es.eigenvectors() * lam.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

Mat psd_inv_sqrt_of(const Mat& x) {
  Eigen::SelfAdjointEigenSolver<Mat> es(x);
  if (es.info() != Eigen::Success)
    throw ConvergenceError("nt_scaling_point: eigendecomposition failed");
  Vec lam = es.eigenvalues();
  const double floor = 1e-14 * std::max(0.0, lam.maxCoeff());
  for (int i = 0; i < lam.size(); ++i) lam[i] = std::max(lam[i], floor);
  return es.eigenvectors() * lam.cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

Vec soc_nt_point(const Eigen::Ref<const Vec>& a, const Eigen::Ref<const Vec>& b) {
  const int m = static_cast<int>(a.size());
  auto jmul = [m](const Eigen::Ref<const Vec>& v) {
    Vec r = -v;
    r[m - 1] = v[m - 1];
    return r;
  };
  const double sa = a[m - 1] * a[m - 1] - a.head(m - 1).squaredNorm();
  const double sb = b[m - 1] * b[m - 1] - b.head(m - 1).squaredNorm();
  const double gamma = std::sqrt(sa * sb) + a.dot(b);
  const double p = 1.0 / std::sqrt(gamma);
  const double q = p * std::sqrt(sa / sb);
  return p * a + q * jmul(b);
}

}  // namespace

Vec nt_scaling_point(const ConeDescriptor& cone, const Vec& a, const Vec& b) {
  detail::check_dim(cone, a, "nt_scaling_point");
  detail::check_dim(cone, b, "nt_scaling_point");
  if (!cone.symmetric())
    throw PreconditionError("nt_scaling_point: cone must be symmetric");
  if (!contains_interior(cone, a) || !contains_interior(cone, b))
    throw PreconditionError("nt_scaling_point: a and b must be strictly interior");
  Vec w(cone.dim());
  for (int i = 0; i < cone.num_blocks(); ++i) {
    const BlockSlice& s = cone.slice(i);
    auto aseg = a.segment(s.offset, s.length);
    auto bseg = b.segment(s.offset, s.length);
    auto out = w.segment(s.offset, s.length);
    switch (cone.blocks()[static_cast<size_t>(i)].type) {
      case BlockType::orthant:
        out = (aseg.cwiseQuotient(bseg)).cwiseSqrt();
        break;
      case BlockType::second_order:
        out = soc_nt_point(aseg, bseg);
        break;
      case BlockType::psd: {
        Mat ha = psd_sqrt_of(smat(aseg));
        Mat mid = psd_inv_sqrt_of(ha * smat(bseg) * ha);
        out = svec(ha * mid * ha);
        break;
      }
      case BlockType::half_soc3:
        break;
    }
  }
  return w;
}

Vec nt_scaling_point_newton(const ConeDescriptor& cone, const Vec& a, const Vec& b, double tol,
                            int max_iter) {
  detail::check_dim(cone, a, "nt_scaling_point_newton");
  detail::check_dim(cone, b, "nt_scaling_point_newton");
  if (!contains_interior(cone, a) || !contains_interior(cone, b))
    throw PreconditionError("nt_scaling_point_newton: a and b must be strictly interior");
  const int n = cone.dim();
  auto residual = [&](const Vec& w) {
    BarrierPoint p(cone, w);
    return Vec(p.hessian_apply(a) - b);
  };
  // Hessians are (-2)-homogeneous, so a radial scaling of the canonical
  // point balances the residual before Newton starts.
  Vec w = canonical_interior_point(cone);
  {
    BarrierPoint p(cone, w);
    const double sigma = std::sqrt(p.hessian_apply(a).norm() / b.norm());
    w *= sigma;
  }
  Vec r = residual(w);
  const double target = tol * b.norm();
  for (int it = 0; it < max_iter; ++it) {
    if (r.norm() <= target) return w;
    // Finite-difference Jacobian of w -> hess F(w) a.
    Mat jac(n, n);
    const double base = 1e-6 * (1.0 + w.norm());
    for (int j = 0; j < n; ++j) {
      Vec wp = w, wm = w;
      wp[j] += base;
      wm[j] -= base;
      if (!contains_interior(cone, wm, 0.0)) {
        wm = w;
        jac.col(j) = (residual(wp) - r) / base;
      } else {
        jac.col(j) = (residual(wp) - residual(wm)) / (2.0 * base);
      }
    }
    Vec d = jac.colPivHouseholderQr().solve(-r);
    BarrierPoint p(cone, w);
    double alpha = std::min(1.0, 0.9 * p.max_feasible_step(d));
    bool ok = false;
    const double rn = r.norm();
    while (alpha > 1e-18) {
      Vec wt = w + alpha * d;
      if (contains_interior(cone, wt, 0.0)) {
        Vec rt = residual(wt);
        if (rt.norm() < (1.0 - 1e-4 * alpha) * rn) {
          w = wt;
          r = rt;
          ok = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!ok) break;
  }
  if (r.norm() > target)
    throw ConvergenceError("nt_scaling_point_newton: no convergence, residual " +
                               std::to_string(r.norm()),
                           r.norm());
  return w;
}

std::pair<Factorization, ScalingCertificate> normalize_factorization(const Factorization& fac,
                                                                     const SolveOptions& opts) {
  if (!fac.cone.symmetric())
    throw PreconditionError("normalize_factorization: cone must be symmetric");
  validate_factorization(fac);
  const double delta = max_pairing(fac);
  ScalingCertificate cert;
  cert.theta = theta(fac.cone);
  cert.delta = delta;

  Factorization out = fac;
  if (!(delta > 0.0)) {
    // Theorem-2 special case: all pairings vanish; scale both sets by a
    // small epsilon (an automorphism), products remain exactly zero.
    double max_norm = 0.0;
    for (const Vec& v : fac.a) max_norm = std::max(max_norm, v.norm());
    for (const Vec& v : fac.b) max_norm = std::max(max_norm, v.norm());
    const double eps = opts.eps_zero > 0.0 ? opts.eps_zero : std::min(1.0, 1.0 / (1.0 + max_norm));
    for (Vec& v : out.a) v *= eps;
    for (Vec& v : out.b) v *= eps;
    cert.epsilon_scaled = true;
    cert.epsilon = eps;
    cert.scaling = ScalingOperator();  // unused on this path
    for (const Vec& v : out.a)
      cert.max_primal_norm_sq = std::max(cert.max_primal_norm_sq, v.squaredNorm());
    for (const Vec& v : out.b)
      cert.max_dual_norm_sq = std::max(cert.max_dual_norm_sq, v.squaredNorm());
    cert.inner_product_max_error = 0.0;
    for (size_t i = 0; i < fac.a.size(); ++i)
      for (size_t j = 0; j < fac.b.size(); ++j)
        cert.inner_product_max_error = std::max(
            cert.inner_product_max_error, std::abs(out.a[i].dot(out.b[j]) - fac.a[i].dot(fac.b[j])));
    return {out, cert};
  }

  ScalingOperator scaling;
  if (opts.blockwise && fac.cone.num_blocks() > 1) {
    // Per-block normalization (product remark): each block must satisfy the
    // interiority hypotheses on its own.
    std::vector<ScalingOperator> parts;
    double t_max = 0.0, kkt_max = 0.0;
    for (int i = 0; i < fac.cone.num_blocks(); ++i) {
      const BlockSlice& s = fac.cone.slice(i);
      Factorization sub;
      sub.cone = ConeDescriptor({fac.cone.blocks()[static_cast<size_t>(i)]});
      for (const Vec& v : fac.a) sub.a.push_back(v.segment(s.offset, s.length));
      for (const Vec& v : fac.b) sub.b.push_back(v.segment(s.offset, s.length));
      double sub_delta = max_pairing(sub);
      if (!(sub_delta > 0.0))
        throw PreconditionError("normalize_factorization: blockwise delta = 0 in block " +
                                std::to_string(i));
      if (!conic_hull_meets_interior(sub.cone, sub.a))
        throw PreconditionError(
            "normalize_factorization: blockwise hypothesis fails for A in block " +
            std::to_string(i));
      if (!conic_hull_meets_interior(sub.cone, sub.b))
        throw PreconditionError(
            "normalize_factorization: blockwise hypothesis fails for B in block " +
            std::to_string(i));
      SolveOptions sub_opts = opts;
      sub_opts.blockwise = false;
      Sym1Solution sol = solve_sym1(sub, sub_opts);
      t_max = std::max(t_max, sol.t);
      kkt_max = std::max(kkt_max, sol.kkt_residual);
      parts.push_back(BarrierPoint(sub.cone, sol.w).hessian_sqrt());
    }
    scaling = ScalingOperator::concat(parts);
    cert.t_bar = t_max;
    cert.kkt_residual = kkt_max;
  } else {
    Sym1Solution sol = solve_sym1(fac, opts);
    scaling = BarrierPoint(fac.cone, sol.w).hessian_sqrt();
    cert.t_bar = sol.t;
    cert.kkt_residual = sol.kkt_residual;
  }

  for (Vec& v : out.a) v = scaling.apply(v);
  for (Vec& v : out.b) v = scaling.inverse_adjoint_apply(v);
  for (const Vec& v : out.a)
    cert.max_primal_norm_sq = std::max(cert.max_primal_norm_sq, v.squaredNorm());
  for (const Vec& v : out.b)
    cert.max_dual_norm_sq = std::max(cert.max_dual_norm_sq, v.squaredNorm());
  for (size_t i = 0; i < fac.a.size(); ++i)
    for (size_t j = 0; j < fac.b.size(); ++j)
      cert.inner_product_max_error = std::max(
          cert.inner_product_max_error, std::abs(out.a[i].dot(out.b[j]) - fac.a[i].dot(fac.b[j])));
  cert.scaling = scaling;
  return {out, cert};
}

}  // namespace conescale
