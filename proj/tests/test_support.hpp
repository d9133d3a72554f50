#pragma once

// Generators for property-style tests.

#include "unred/curve.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>
#include <random>

namespace unred::testing {

inline constexpr double pi = std::numbers::pi;

/// Star-shaped smooth curve: radius 1 + Σ small low-mode terms, optionally
/// with a smooth non-uniform parametrisation θ ↦ θ + ε sin θ.
inline ClosedCurve random_smooth_curve(std::mt19937_64& rng, std::size_t n,
                                       double warp = 0.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double a[4];
  double b[4];
  for (int m = 0; m < 4; ++m) {
    a[m] = 0.08 * u(rng) / (m + 1);
    b[m] = 0.08 * u(rng) / (m + 1);
  }
  const Point center(u(rng), u(rng));
  Points pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * pi * static_cast<double>(i) / static_cast<double>(n);
    const double th = t + warp * std::sin(t);
    double r = 1.0;
    for (int m = 0; m < 4; ++m) r += a[m] * std::cos((m + 2) * th) + b[m] * std::sin((m + 2) * th);
    pts[i] = center + r * Point(std::cos(th), std::sin(th));
  }
  return ClosedCurve(std::move(pts));
}

/// Smooth periodic scalar field with a few random low modes.
inline Field random_smooth_field(std::mt19937_64& rng, std::size_t n, int modes = 4) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Field f(n, u(rng));
  for (int m = 1; m <= modes; ++m) {
    const double a = u(rng) / m;
    const double b = u(rng) / m;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = 2.0 * pi * static_cast<double>(i) / static_cast<double>(n);
      f[i] += a * std::cos(m * t) + b * std::sin(m * t);
    }
  }
  return f;
}

inline Points random_smooth_vectors(std::mt19937_64& rng, std::size_t n) {
  const Field x = random_smooth_field(rng, n);
  const Field y = random_smooth_field(rng, n);
  Points p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = Point(x[i], y[i]);
  return p;
}

inline double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs_diff(const Points& a, const Points& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, (a[i] - b[i]).cwiseAbs().maxCoeff());
  return m;
}

}  // namespace unred::testing
