// conescale - normalization of factorizations over convex cones
// Copyright 2026 The conescale Authors
// Licensed under Apache 2.0

#include "conescale/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace conescale {

namespace {

using BigVec = std::vector<BigInt>;

BigInt dot(const BigVec& a, const BigVec& b) {
  BigInt s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

BigInt inf_norm(const BigVec& a) {
  BigInt m = 0;
  for (const BigInt& x : a) m = std::max(m, BigInt(abs(x)));
  return m;
}

void make_primitive(BigVec& v) {
  BigInt g = 0;
  for (const BigInt& x : v) g = gcd(g, BigInt(abs(x)));
  if (g > 1)
    for (BigInt& x : v) x /= g;
}

// Reduced row echelon form over the rationals.  Returns pivot columns.
std::vector<int> rref(std::vector<std::vector<BigRat>>& m) {
  const int rows = static_cast<int>(m.size());
  const int cols = rows ? static_cast<int>(m[0].size()) : 0;
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int pivot = -1;
    for (int i = r; i < rows; ++i)
      if (m[static_cast<size_t>(i)][static_cast<size_t>(c)] != 0) {
        pivot = i;
        break;
      }
    if (pivot < 0) continue;
    std::swap(m[static_cast<size_t>(r)], m[static_cast<size_t>(pivot)]);
    const BigRat lead = m[static_cast<size_t>(r)][static_cast<size_t>(c)];
    for (int j = 0; j < cols; ++j) m[static_cast<size_t>(r)][static_cast<size_t>(j)] /= lead;
    for (int i = 0; i < rows; ++i) {
      if (i == r) continue;
      const BigRat factor = m[static_cast<size_t>(i)][static_cast<size_t>(c)];
      if (factor == 0) continue;
      for (int j = 0; j < cols; ++j)
        m[static_cast<size_t>(i)][static_cast<size_t>(j)] -=
            factor * m[static_cast<size_t>(r)][static_cast<size_t>(j)];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

int exact_rank(const std::vector<BigVec>& vecs, int dim) {
  std::vector<std::vector<BigRat>> m;
  for (const BigVec& v : vecs) {
    std::vector<BigRat> row(static_cast<size_t>(dim));
    for (int j = 0; j < dim; ++j) row[static_cast<size_t>(j)] = BigRat(v[static_cast<size_t>(j)]);
    m.push_back(std::move(row));
  }
  return static_cast<int>(rref(m).size());
}

BigVec rational_to_primitive(const std::vector<BigRat>& v) {
  BigInt lcm_den = 1;
  for (const BigRat& x : v) {
    const BigInt den = denominator(x);
    lcm_den = lcm(lcm_den, den);
  }
  BigVec out;
  out.reserve(v.size());
  for (const BigRat& x : v) out.push_back(numerator(x) * (lcm_den / denominator(x)));
  make_primitive(out);
  return out;
}

// Primitive integer basis of { f : <v, f> = 0 for all v } from the RREF of
// the stacked V rows.
std::vector<BigVec> kernel_basis(const std::vector<BigVec>& v, int dim) {
  std::vector<std::vector<BigRat>> m;
  for (const BigVec& row : v) {
    std::vector<BigRat> r(static_cast<size_t>(dim));
    for (int j = 0; j < dim; ++j) r[static_cast<size_t>(j)] = BigRat(row[static_cast<size_t>(j)]);
    m.push_back(std::move(r));
  }
  std::vector<int> pivots = rref(m);
  std::vector<bool> is_pivot(static_cast<size_t>(dim), false);
  for (int c : pivots) is_pivot[static_cast<size_t>(c)] = true;
  std::vector<BigVec> basis;
  for (int free = 0; free < dim; ++free) {
    if (is_pivot[static_cast<size_t>(free)]) continue;
    std::vector<BigRat> f(static_cast<size_t>(dim), BigRat(0));
    f[static_cast<size_t>(free)] = 1;
    for (size_t pr = 0; pr < pivots.size(); ++pr)
      f[static_cast<size_t>(pivots[pr])] = -m[pr][static_cast<size_t>(free)];
    basis.push_back(rational_to_primitive(f));
  }
  return basis;
}

// Nullspace (expected 1-dimensional) of a small rational system, or empty.
std::vector<BigRat> one_dim_nullspace(std::vector<std::vector<BigRat>> m, int cols) {
  std::vector<int> pivots = rref(m);
  if (static_cast<int>(pivots.size()) != cols - 1) return {};
  std::vector<bool> is_pivot(static_cast<size_t>(cols), false);
  for (int c : pivots) is_pivot[static_cast<size_t>(c)] = true;
  int free = -1;
  for (int c = 0; c < cols; ++c)
    if (!is_pivot[static_cast<size_t>(c)]) free = c;
  std::vector<BigRat> sol(static_cast<size_t>(cols), BigRat(0));
  sol[static_cast<size_t>(free)] = 1;
  for (size_t pr = 0; pr < pivots.size(); ++pr)
    sol[static_cast<size_t>(pivots[pr])] = -m[pr][static_cast<size_t>(free)];
  return sol;
}

struct HullResult {
  std::vector<BigVec> facets;      // inward normals within span(V)
  std::vector<BigVec> equalities;  // both orientations of the affine-hull equalities
  int rank = 0;
};

HullResult exact_cone_hull(const std::vector<BigVec>& v, int dim) {
  HullResult out;
  out.rank = exact_rank(v, dim);
  for (const BigVec& g : kernel_basis(v, dim)) {
    BigVec neg = g;
    for (BigInt& x : neg) x = -x;
    out.equalities.push_back(g);
    out.equalities.push_back(neg);
  }

  const int r = out.rank;
  const int k = static_cast<int>(v.size());
  // Span basis: r independent members of V (first independent rows).
  std::vector<BigVec> span_basis;
  {
    std::vector<BigVec> acc;
    for (const BigVec& row : v) {
      acc.push_back(row);
      if (exact_rank(acc, dim) == static_cast<int>(span_basis.size()) + 1)
        span_basis.push_back(row);
      else
        acc.pop_back();
      if (static_cast<int>(span_basis.size()) == r) break;
    }
  }

  std::set<BigVec> found;
  if (r == 1) {
    // Single ray: the supporting functional is the primitive generator.
    BigVec f = span_basis.front();
    make_primitive(f);
    if (dot(v.front(), f) < 0)
      for (BigInt& x : f) x = -x;
    found.insert(f);
  } else if (r >= 2) {
    // Enumerate (r-1)-subsets; a work cap keeps this at desk scale.
    double est = 1.0;
    for (int i = 0; i < r - 1; ++i) est *= static_cast<double>(k - i) / (i + 1);
    if (est > 2e6)
      throw PreconditionError("polytope: facet enumeration cap exceeded (" +
                              std::to_string(static_cast<long long>(est)) + " subsets)");
    std::vector<int> subset(static_cast<size_t>(r - 1));
    for (int i = 0; i < r - 1; ++i) subset[static_cast<size_t>(i)] = i;
    while (true) {
      // Solve for f = sum c_i span_basis[i] with <v_s, f> = 0 for s in subset.
      std::vector<std::vector<BigRat>> sys;
      for (int s : subset) {
        std::vector<BigRat> row(static_cast<size_t>(r));
        for (int i = 0; i < r; ++i)
          row[static_cast<size_t>(i)] = BigRat(dot(v[static_cast<size_t>(s)],
                                                   span_basis[static_cast<size_t>(i)]));
        sys.push_back(std::move(row));
      }
      std::vector<BigRat> c = one_dim_nullspace(std::move(sys), r);
      if (!c.empty()) {
        std::vector<BigRat> f_rat(static_cast<size_t>(dim), BigRat(0));
        for (int i = 0; i < r; ++i)
          for (int j = 0; j < dim; ++j)
            f_rat[static_cast<size_t>(j)] +=
                c[static_cast<size_t>(i)] * BigRat(span_basis[static_cast<size_t>(i)][static_cast<size_t>(j)]);
        BigVec f = rational_to_primitive(f_rat);
        bool nonzero = false;
        for (const BigInt& x : f) nonzero = nonzero || x != 0;
        if (nonzero) {
          bool has_pos = false, has_neg = false;
          for (const BigVec& vv : v) {
            const BigInt s = dot(vv, f);
            has_pos = has_pos || s > 0;
            has_neg = has_neg || s < 0;
          }
          if (!(has_pos && has_neg)) {
            if (has_neg)
              for (BigInt& x : f) x = -x;
            found.insert(f);
          }
        }
      }
      // next subset
      int pos = r - 2;
      while (pos >= 0 && subset[static_cast<size_t>(pos)] == k - (r - 1) + pos) --pos;
      if (pos < 0) break;
      ++subset[static_cast<size_t>(pos)];
      for (int i = pos + 1; i < r - 1; ++i)
        subset[static_cast<size_t>(i)] = subset[static_cast<size_t>(i - 1)] + 1;
    }
  }
  out.facets.assign(found.begin(), found.end());
  return out;
}

// Extremality: the active constraints at v must cut the cone down to the ray
// through v, i.e. have rank d - 1.
void verify_vertices(const PolytopeInstance& inst) {
  for (const BigVec& vv : inst.v) {
    std::vector<BigVec> active;
    for (const BigVec& f : inst.f)
      if (dot(vv, f) == 0) active.push_back(f);
    if (exact_rank(active, inst.d) != inst.d - 1)
      throw std::logic_error("polytope: a member of V is not a vertex of the hull");
  }
}

void verify_conditions(const PolytopeInstance& inst) {
  for (const BigVec& vv : inst.v)
    for (const BigVec& f : inst.f)
      if (dot(vv, f) < 0) throw std::logic_error("polytope: condition (ii) failed");
  for (const BigVec& p : inst.ground_set()) {
    if (std::find(inst.v.begin(), inst.v.end(), p) != inst.v.end()) continue;
    bool separated = false;
    for (const BigVec& f : inst.f)
      if (dot(p, f) <= -1) separated = true;
    if (!separated) throw std::logic_error("polytope: condition (iii) failed");
  }
  if (inst.m_observed > inst.m_bound)
    throw std::logic_error("polytope: condition (i) failed, ||f||_inf exceeds M");
  verify_vertices(inst);
}

PolytopeInstance build_instance(int d, std::vector<BigVec> v, std::string family, long long t,
                                BigInt m_bound, double m_bound_log2) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  PolytopeInstance inst;
  inst.d = d;
  inst.v = std::move(v);
  inst.family = std::move(family);
  inst.t = t;
  inst.m_bound = std::move(m_bound);
  inst.m_bound_log2 = m_bound_log2;
  HullResult hull = exact_cone_hull(inst.v, d);
  inst.f = hull.equalities;
  inst.f.insert(inst.f.end(), hull.facets.begin(), hull.facets.end());
  std::sort(inst.f.begin(), inst.f.end());
  inst.f.erase(std::unique(inst.f.begin(), inst.f.end()), inst.f.end());
  inst.m_observed = 0;
  for (const BigVec& f : inst.f) inst.m_observed = std::max(inst.m_observed, inf_norm(f));
  verify_conditions(inst);
  return inst;
}

}  // namespace

std::vector<std::vector<BigInt>> PolytopeInstance::ground_set() const {
  std::vector<BigVec> out;
  if (family == "zero-one") {
    const int bits = d - 1;
    for (long long mask = 0; mask < (1LL << bits); ++mask) {
      BigVec p(static_cast<size_t>(d));
      for (int i = 0; i < bits; ++i) p[static_cast<size_t>(i)] = (mask >> i) & 1;
      p[static_cast<size_t>(d - 1)] = 1;
      out.push_back(std::move(p));
    }
  } else {
    for (long long k = 0; k <= t; ++k) {
      BigVec p(static_cast<size_t>(d));
      BigInt power = 1;
      for (int i = 0; i < d - 1; ++i) {
        power *= k;
        p[static_cast<size_t>(i)] = power;
      }
      p[static_cast<size_t>(d - 1)] = 1;
      out.push_back(std::move(p));
    }
  }
  return out;
}

PolytopeInstance zero_one_instance(int d, const std::vector<std::vector<int>>& x) {
  if (d < 2 || d > 8)
    throw PreconditionError("zero_one_instance: d must be between 2 and 8");
  if (x.empty()) throw PreconditionError("zero_one_instance: X must be nonempty");
  std::vector<BigVec> v;
  for (const std::vector<int>& pt : x) {
    if (static_cast<int>(pt.size()) != d - 1)
      throw PreconditionError("zero_one_instance: points must have d-1 coordinates");
    BigVec lifted(static_cast<size_t>(d));
    for (int i = 0; i < d - 1; ++i) {
      if (pt[static_cast<size_t>(i)] != 0 && pt[static_cast<size_t>(i)] != 1)
        throw PreconditionError("zero_one_instance: coordinates must be 0 or 1");
      lifted[static_cast<size_t>(i)] = pt[static_cast<size_t>(i)];
    }
    lifted[static_cast<size_t>(d - 1)] = 1;
    v.push_back(std::move(lifted));
  }
  // M = 2^{d log2(2d)} = (2d)^d
  BigInt m_bound = pow(BigInt(2 * d), static_cast<unsigned>(d));
  const double m_log2 = d * std::log2(2.0 * d);
  return build_instance(d, std::move(v), "zero-one", 0, std::move(m_bound), m_log2);
}

PolytopeInstance cyclic_instance(int d, long long t, const std::vector<long long>& x) {
  if (d < 2) throw PreconditionError("cyclic_instance: d must be >= 2");
  if (t < 0) throw PreconditionError("cyclic_instance: t must be nonnegative");
  if (x.empty()) throw PreconditionError("cyclic_instance: X must be nonempty");
  if (static_cast<long long>(d) * static_cast<long long>(x.size()) > 256)
    throw PreconditionError("cyclic_instance: d * |X| cap exceeded");
  std::vector<BigVec> v;
  for (long long k : x) {
    if (k < 0 || k > t)
      throw PreconditionError("cyclic_instance: members of X must lie in {0,...,t}");
    BigVec pt(static_cast<size_t>(d));
    BigInt power = 1;
    for (int i = 0; i < d - 1; ++i) {
      power *= k;
      pt[static_cast<size_t>(i)] = power;
    }
    pt[static_cast<size_t>(d - 1)] = 1;
    v.push_back(std::move(pt));
  }
  // M = ((d+1) t^d)^d
  BigInt base = BigInt(d + 1) * pow(BigInt(t), static_cast<unsigned>(d));
  BigInt m_bound = pow(base, static_cast<unsigned>(d));
  const double m_log2 = base > 0 ? d * big_log2(base) : 0.0;
  PolytopeInstance inst =
      build_instance(d, std::move(v), "cyclic", t, std::move(m_bound), m_log2);
  // Theorem hypothesis ||v||_inf <= t^{d-1}
  BigInt v_cap = pow(BigInt(std::max<long long>(t, 1)), static_cast<unsigned>(d - 1));
  for (const BigVec& vv : inst.v)
    if (inf_norm(vv) > v_cap) throw std::logic_error("cyclic_instance: ||v||_inf bound failed");
  return inst;
}

double big_to_double_exact(const BigInt& x) {
  if (abs(x) > BigInt(1) << 53)
    throw PreconditionError("integer too large for exact double conversion");
  return x.convert_to<double>();
}

double big_log2(const BigInt& x) {
  if (x <= 0) throw PreconditionError("big_log2: positive input required");
  const unsigned bits = msb(x);
  if (bits <= 52) return std::log2(x.convert_to<double>());
  const unsigned shift = bits - 52;
  const double top = BigInt(x >> shift).convert_to<double>();
  return static_cast<double>(shift) + std::log2(top);
}

Factorization slack_factorization(const PolytopeInstance& inst) {
  Factorization fac;
  const int nf = static_cast<int>(inst.f.size());
  fac.cone = ConeDescriptor::orthant(nf);
  for (const auto& vv : inst.v) {
    Vec a(nf);
    for (int j = 0; j < nf; ++j)
      a[j] = big_to_double_exact(dot(vv, inst.f[static_cast<size_t>(j)]));
    fac.a.push_back(std::move(a));
    Vec label(inst.d);
    for (int i = 0; i < inst.d; ++i) label[i] = big_to_double_exact(vv[static_cast<size_t>(i)]);
    fac.point_labels.push_back(std::move(label));
  }
  for (int j = 0; j < nf; ++j) {
    Vec b = Vec::Zero(nf);
    b[j] = 1.0;
    fac.b.push_back(std::move(b));
    Vec label(inst.d);
    for (int i = 0; i < inst.d; ++i)
      label[i] = big_to_double_exact(inst.f[static_cast<size_t>(j)][static_cast<size_t>(i)]);
    fac.ineq_labels.push_back(std::move(label));
  }
  return fac;
}

}  // namespace conescale
