#include "unred/connection.hpp"

#include "unred/error.hpp"

#include <string>

namespace unred {

VelocityDecomposition decompose(std::span<const Point> u, const FrenetData& frenet) {
  const std::size_t n = frenet.size();
  if (u.size() != n) {
    throw ValidationError("decompose: velocity has " + std::to_string(u.size()) +
                          " nodes, curve has " + std::to_string(n));
  }
  VelocityDecomposition d{Field(n), Field(n)};
  for (std::size_t i = 0; i < n; ++i) {
    d.v[i] = u[i].dot(frenet.tangent[i]);
    d.h[i] = u[i].dot(frenet.normal[i]);
  }
  return d;
}

Points reconstruct(const VelocityDecomposition& d, const FrenetData& frenet) {
  const std::size_t n = frenet.size();
  if (d.v.size() != n || d.h.size() != n) {
    throw ValidationError("reconstruct: decomposition size does not match curve (" +
                          std::to_string(n) + " nodes)");
  }
  Points u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = d.v[i] * frenet.tangent[i] + d.h[i] * frenet.normal[i];
  return u;
}

}  // namespace unred
