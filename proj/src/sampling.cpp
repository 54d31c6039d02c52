// conescale - normalization of factorizations over convex cones
// Copyright 2026 The conescale Authors
// Licensed under Apache 2.0

#include "conescale/sampling.hpp"

#include <cmath>

namespace conescale {

namespace {

Vec gaussian(int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

Vec block_interior(const Block& b, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.2, 2.0);
  switch (b.type) {
    case BlockType::orthant: {
      Vec v(b.size);
      for (int i = 0; i < b.size; ++i) v[i] = unif(rng);
      return v;
    }
    case BlockType::second_order: {
      Vec v = gaussian(b.size, rng);
      v[b.size - 1] = v.head(b.size - 1).norm() + unif(rng);
      return v;
    }
    case BlockType::psd: {
      Mat a(b.size, b.size);
      for (int i = 0; i < b.size; ++i)
        for (int j = 0; j < b.size; ++j) a(i, j) = gaussian(1, rng)[0];
      Mat x = a * a.transpose() + unif(rng) * Mat::Identity(b.size, b.size);
      return svec(x);
    }
    case BlockType::half_soc3: {
      Vec v(3);
      v[0] = unif(rng);
      v[1] = gaussian(1, rng)[0];
      v[2] = std::hypot(v[0], v[1]) + unif(rng);
      return v;
    }
  }
  return Vec();
}

Vec block_boundary(const Block& b, Rng& rng) {
  std::uniform_real_distribution<double> unif01(0.0, 1.0);
  switch (b.type) {
    case BlockType::orthant: {
      Vec v = block_interior(b, rng);
      int zeros = 1 + static_cast<int>(unif01(rng) * b.size) % b.size;
      for (int k = 0; k < zeros; ++k)
        v[static_cast<int>(unif01(rng) * b.size) % b.size] = 0.0;
      return v;
    }
    case BlockType::second_order: {
      Vec v = gaussian(b.size, rng);
      v[b.size - 1] = v.head(b.size - 1).norm();
      return v;
    }
    case BlockType::psd: {
      if (b.size == 1) return Vec::Zero(1);
      int rank = 1 + static_cast<int>(unif01(rng) * (b.size - 1)) % (b.size - 1);
      Mat a(b.size, rank);
      for (int i = 0; i < b.size; ++i)
        for (int j = 0; j < rank; ++j) a(i, j) = gaussian(1, rng)[0];
      return svec(Mat(a * a.transpose()));
    }
    case BlockType::half_soc3: {
      Vec v(3);
      if (unif01(rng) < 0.5) {
        // face x1 = 0, |x2| <= x3
        v[0] = 0.0;
        v[1] = gaussian(1, rng)[0];
        v[2] = std::abs(v[1]) * (1.0 + unif01(rng));
      } else {
        // SOC boundary with x1 >= 0
        v[0] = std::abs(gaussian(1, rng)[0]);
        v[1] = gaussian(1, rng)[0];
        v[2] = std::hypot(v[0], v[1]);
      }
      return v;
    }
  }
  return Vec();
}

}  // namespace

Vec sample_interior_point(const ConeDescriptor& cone, Rng& rng) {
  Vec x(cone.dim());
  for (int i = 0; i < cone.num_blocks(); ++i) {
    const BlockSlice& s = cone.slice(i);
    x.segment(s.offset, s.length) = block_interior(cone.blocks()[static_cast<size_t>(i)], rng);
  }
  return x;
}

Vec sample_boundary_point(const ConeDescriptor& cone, Rng& rng) {
  std::uniform_int_distribution<int> pick(0, cone.num_blocks() - 1);
  const int boundary_block = pick(rng);
  Vec x(cone.dim());
  for (int i = 0; i < cone.num_blocks(); ++i) {
    const BlockSlice& s = cone.slice(i);
    const Block& b = cone.blocks()[static_cast<size_t>(i)];
    x.segment(s.offset, s.length) =
        (i == boundary_block) ? block_boundary(b, rng) : block_interior(b, rng);
  }
  return x;
}

Vec sample_cone_point(const ConeDescriptor& cone, Rng& rng) {
  std::uniform_real_distribution<double> unif01(0.0, 1.0);
  return unif01(rng) < 0.5 ? sample_boundary_point(cone, rng)
                           : sample_interior_point(cone, rng);
}

Vec sample_dual_point(const ConeDescriptor& cone, Rng& rng) {
  if (cone.symmetric()) return sample_cone_point(cone, rng);
  // half_soc3 dual: SOC3 point plus a nonnegative multiple of e1
  std::uniform_real_distribution<double> unif(0.0, 2.0);
  Vec y = gaussian(3, rng);
  y[2] = y.head(2).norm() + unif(rng) * 0.5;
  y[0] += unif(rng);
  return y;
}

}  // namespace conescale
