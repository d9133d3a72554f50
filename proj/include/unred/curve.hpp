#pragma once

#include "unred/types.hpp"

#include <cstddef>
#include <span>

namespace unred {

/// Closed planar curve sampled at the uniform parameter nodes
/// θ_i = 2πi/N, i = 0..N-1, with point N identified with point 0.
///
/// Construction rejects fewer than `min_nodes` points, non-finite
/// coordinates and coincident neighbours.
class ClosedCurve {
 public:
  static constexpr std::size_t min_nodes = 8;

  explicit ClosedCurve(Points points);

  std::size_t size() const noexcept { return points_.size(); }
  const Points& points() const noexcept { return points_; }
  const Point& operator[](std::size_t i) const { return points_[i]; }

  /// Parameter spacing Δθ = 2π/N.
  double spacing() const noexcept;

  /// Cyclic relabelling: result[i] = this[(i + k) mod N].
  ClosedCurve shifted(std::ptrdiff_t k) const;

  /// Rigid motion x ↦ R(angle)·x + offset.
  ClosedCurve moved(double angle, const Point& offset) const;

 private:
  Points points_;
};

/// Per-node Frenet frame and metric data. The normal is the tangent rotated
/// by +π/2, so for a counter-clockwise circle it points inward and κ > 0.
struct FrenetData {
  Points tangent;
  Points normal;
  Field curvature;
  Field speed;  // |c_θ|
  double length = 0.0;

  std::size_t size() const noexcept { return speed.size(); }
  double spacing() const noexcept;
};

/// Speed below which the frame is considered undefined.
inline constexpr double degenerate_speed = 1e-12;

FrenetData compute_frenet(const ClosedCurve& curve);

/// D_θ f = (1/|c_θ|) ∂_θ f using the centred periodic stencil.
Field arclength_derivative(std::span<const double> f, const FrenetData& frenet);

/// ∫ f ds ≈ Σ f_i |c_θ|_i Δθ.
double curve_integral(std::span<const double> f, const FrenetData& frenet);

/// Parameter values θ_i for an N-node curve.
Field parameter_nodes(std::size_t n);

ClosedCurve make_circle(std::size_t n, double radius = 1.0, const Point& center = Point::Zero());
ClosedCurve make_ellipse(std::size_t n, double a, double b);

/// Periodic cubic spline through the nodes, resampled at m uniform
/// parameter values.
ClosedCurve resample_parameter(const ClosedCurve& curve, std::size_t m);

/// Resamples to m nodes equally spaced in arclength of the spline
/// interpolant; node 0 is kept fixed.
ClosedCurve resample_arclength(const ClosedCurve& curve, std::size_t m);

}  // namespace unred
