#include "unred/curve.hpp"

#include "unred/error.hpp"
#include "unred/spectral.hpp"

#include <Eigen/Geometry>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace unred {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void require_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw ValidationError(std::string(what) + ": field has " + std::to_string(got) +
                          " nodes, curve has " + std::to_string(want));
  }
}

Point rotate_quarter(const Point& p) { return Point(-p.y(), p.x()); }

// Periodic cubic spline through unit-spaced samples, one coordinate at a time.
class PeriodicSpline {
 public:
  explicit PeriodicSpline(const Points& pts) : y_(pts), m_(pts.size(), Point::Zero()) {
    const auto n = static_cast<Eigen::Index>(pts.size());
    Eigen::SparseMatrix<double> a(n, n);
    std::vector<Eigen::Triplet<double>> trips;
    for (Eigen::Index i = 0; i < n; ++i) {
      trips.emplace_back(i, i, 4.0);
      trips.emplace_back(i, (i + 1) % n, 1.0);
      trips.emplace_back(i, (i + n - 1) % n, 1.0);
    }
    a.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(a);
    for (int d = 0; d < 2; ++d) {
      Eigen::VectorXd rhs(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        rhs[i] = 6.0 * (y_[(i + 1) % n][d] - 2.0 * y_[i][d] + y_[(i + n - 1) % n][d]);
      }
      const Eigen::VectorXd sol = solver.solve(rhs);
      for (Eigen::Index i = 0; i < n; ++i) m_[i][d] = sol[i];
    }
  }

  std::size_t size() const { return y_.size(); }

  // u in [0, N), periodic.
  Point value(double u) const {
    auto [i, t] = locate(u);
    const std::size_t j = (i + 1) % y_.size();
    const double s = 1.0 - t;
    return s * y_[i] + t * y_[j] + ((s * s * s - s) * m_[i] + (t * t * t - t) * m_[j]) / 6.0;
  }

  Point derivative(double u) const {
    auto [i, t] = locate(u);
    const std::size_t j = (i + 1) % y_.size();
    const double s = 1.0 - t;
    return y_[j] - y_[i] + ((1.0 - 3.0 * s * s) * m_[i] + (3.0 * t * t - 1.0) * m_[j]) / 6.0;
  }

 private:
  std::pair<std::size_t, double> locate(double u) const {
    const double n = static_cast<double>(y_.size());
    u = std::fmod(u, n);
    if (u < 0.0) u += n;
    auto i = static_cast<std::size_t>(std::floor(u));
    if (i >= y_.size()) i = y_.size() - 1;
    return {i, u - static_cast<double>(i)};
  }

  Points y_;
  Points m_;
};

}  // namespace

ClosedCurve::ClosedCurve(Points points) : points_(std::move(points)) {
  if (points_.size() < min_nodes) {
    throw ValidationError("closed curve needs at least " + std::to_string(min_nodes) +
                          " nodes, got " + std::to_string(points_.size()));
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!points_[i].allFinite()) {
      throw ValidationError("non-finite coordinate at node " + std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const Point& next = points_[(i + 1) % points_.size()];
    if ((next - points_[i]).norm() == 0.0) {
      throw DegenerateCurveError("nodes " + std::to_string(i) + " and " +
                                 std::to_string((i + 1) % points_.size()) + " coincide");
    }
  }
}

double ClosedCurve::spacing() const noexcept {
  return two_pi / static_cast<double>(points_.size());
}

ClosedCurve ClosedCurve::shifted(std::ptrdiff_t k) const {
  const auto n = static_cast<std::ptrdiff_t>(points_.size());
  const std::ptrdiff_t offset = ((k % n) + n) % n;
  Points out(points_.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = points_[(i + offset) % n];
  return ClosedCurve(std::move(out));
}

ClosedCurve ClosedCurve::moved(double angle, const Point& offset) const {
  const Eigen::Rotation2Dd rot(angle);
  Points out(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) out[i] = rot * points_[i] + offset;
  return ClosedCurve(std::move(out));
}

double FrenetData::spacing() const noexcept { return two_pi / static_cast<double>(size()); }

FrenetData compute_frenet(const ClosedCurve& curve) {
  const std::size_t n = curve.size();
  const double h = curve.spacing();
  const Points c_theta = spectral::periodic_derivative(std::span<const Point>(curve.points()));

  FrenetData fr;
  fr.tangent.resize(n);
  fr.normal.resize(n);
  fr.speed.resize(n);
  fr.curvature.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = c_theta[i].norm();
    if (!(s >= degenerate_speed)) {
      throw DegenerateCurveError("curve speed " + std::to_string(s) + " at node " +
                                 std::to_string(i) + " is below " +
                                 std::to_string(degenerate_speed));
    }
    fr.speed[i] = s;
    fr.tangent[i] = c_theta[i] / s;
    fr.normal[i] = rotate_quarter(fr.tangent[i]);
  }
  double length = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point dt = (fr.tangent[(i + 1) % n] - fr.tangent[(i + n - 1) % n]) /
                     (2.0 * h * fr.speed[i]);
    fr.curvature[i] = dt.dot(fr.normal[i]);
    length += fr.speed[i];
  }
  fr.length = length * h;
  return fr;
}

Field arclength_derivative(std::span<const double> f, const FrenetData& frenet) {
  const std::size_t n = frenet.size();
  require_size(f.size(), n, "arclength_derivative");
  const double h = frenet.spacing();
  Field out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = (f[(i + 1) % n] - f[(i + n - 1) % n]) / (2.0 * h * frenet.speed[i]);
  }
  return out;
}

double curve_integral(std::span<const double> f, const FrenetData& frenet) {
  require_size(f.size(), frenet.size(), "curve_integral");
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += f[i] * frenet.speed[i];
  return acc * frenet.spacing();
}

Field parameter_nodes(std::size_t n) {
  Field theta(n);
  for (std::size_t i = 0; i < n; ++i) {
    theta[i] = two_pi * static_cast<double>(i) / static_cast<double>(n);
  }
  return theta;
}

ClosedCurve make_circle(std::size_t n, double radius, const Point& center) {
  Points pts(n);
  const Field theta = parameter_nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    pts[i] = center + radius * Point(std::cos(theta[i]), std::sin(theta[i]));
  }
  return ClosedCurve(std::move(pts));
}

ClosedCurve make_ellipse(std::size_t n, double a, double b) {
  Points pts(n);
  const Field theta = parameter_nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    pts[i] = Point(a * std::cos(theta[i]), b * std::sin(theta[i]));
  }
  return ClosedCurve(std::move(pts));
}

ClosedCurve resample_parameter(const ClosedCurve& curve, std::size_t m) {
  const PeriodicSpline spline(curve.points());
  const double scale = static_cast<double>(curve.size()) / static_cast<double>(m);
  Points out(m);
  for (std::size_t j = 0; j < m; ++j) out[j] = spline.value(scale * static_cast<double>(j));
  return ClosedCurve(std::move(out));
}

ClosedCurve resample_arclength(const ClosedCurve& curve, std::size_t m) {
  const PeriodicSpline spline(curve.points());
  const std::size_t n = curve.size();
  // 5-point Gauss-Legendre on each spline segment.
  static constexpr std::array<double, 5> gx = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                               0.5384693101056831, 0.9061798459386640};
  static constexpr std::array<double, 5> gw = {0.2369268850561891, 0.4786286704993665,
                                               0.5688888888888889, 0.4786286704993665,
                                               0.2369268850561891};
  auto segment_length = [&](double u0, double u1) {
    const double mid = 0.5 * (u0 + u1);
    const double half = 0.5 * (u1 - u0);
    double acc = 0.0;
    for (std::size_t q = 0; q < gx.size(); ++q) {
      acc += gw[q] * spline.derivative(mid + half * gx[q]).norm();
    }
    return acc * half;
  };

  Field cumulative(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    cumulative[i + 1] = cumulative[i] + segment_length(static_cast<double>(i),
                                                       static_cast<double>(i) + 1.0);
  }
  const double total = cumulative[n];
  Points out(m);
  std::size_t seg = 0;
  for (std::size_t j = 0; j < m; ++j) {
    const double target = total * static_cast<double>(j) / static_cast<double>(m);
    while (seg + 1 < n && cumulative[seg + 1] < target) ++seg;
    // Bisection inside the segment.
    double lo = static_cast<double>(seg);
    double hi = lo + 1.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (cumulative[seg] + segment_length(static_cast<double>(seg), mid) < target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    out[j] = spline.value(0.5 * (lo + hi));
  }
  return ClosedCurve(std::move(out));
}

}  // namespace unred
