// conescale - normalization of factorizations over convex cones
// Copyright 2026 The conescale Authors
// Licensed under Apache 2.0

#pragma once

#include <random>

#include "conescale/cone.hpp"

namespace conescale {

using Rng = std::mt19937_64;

// Strictly interior point with O(1) coordinates.
Vec sample_interior_point(const ConeDescriptor& cone, Rng& rng);

// Point on the boundary of the cone (at least one block sits on its
// boundary face).
Vec sample_boundary_point(const ConeDescriptor& cone, Rng& rng);

// Mixed sample: boundary with probability ~1/2, interior otherwise.
Vec sample_cone_point(const ConeDescriptor& cone, Rng& rng);

// Point of the dual cone.  Same distribution as sample_cone_point for
// symmetric cones; for half_soc3 samples SOC3 points plus a nonnegative
// multiple of e1.
Vec sample_dual_point(const ConeDescriptor& cone, Rng& rng);

}  // namespace conescale
