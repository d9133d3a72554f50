#pragma once

#include "unred/curve.hpp"

#include <span>

namespace unred {

/// Velocity u = v t + h n split into its vertical (reparametrisation, v)
/// and horizontal (shape, h) parts.
struct VelocityDecomposition {
  Field v;
  Field h;
};

VelocityDecomposition decompose(std::span<const Point> u, const FrenetData& frenet);

Points reconstruct(const VelocityDecomposition& d, const FrenetData& frenet);

}  // namespace unred
