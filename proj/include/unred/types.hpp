#pragma once

#include <Eigen/Core>

#include <vector>

namespace unred {

using Point = Eigen::Vector2d;
/// Per-node 2-vector field along a curve.
using Points = std::vector<Point>;
/// Per-node scalar field along a curve.
using Field = std::vector<double>;

}  // namespace unred
