#include "unred/curve.hpp"
#include "unred/error.hpp"

#include "doctest.h"
#include "test_support.hpp"

#include <cmath>

using namespace unred;
using unred::testing::pi;

namespace {

double circle_curvature_error(std::size_t n) {
  const FrenetData fr = compute_frenet(make_circle(n));
  double err = 0.0;
  for (double k : fr.curvature) err = std::max(err, std::abs(k - 1.0));
  return err;
}

// Analytic curvature of (a cos θ, b sin θ).
double ellipse_curvature_error(std::size_t n, double a, double b) {
  const FrenetData fr = compute_frenet(make_ellipse(n, a, b));
  const Field theta = parameter_nodes(n);
  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = std::sin(theta[i]);
    const double c = std::cos(theta[i]);
    const double exact = a * b / std::pow(a * a * s * s + b * b * c * c, 1.5);
    err = std::max(err, std::abs(fr.curvature[i] - exact));
  }
  return err;
}

}  // namespace

TEST_CASE("unit circle curvature is 1 within the second-order bound") {
  CHECK(circle_curvature_error(100) <= 2e-3);
  const FrenetData fr = compute_frenet(make_circle(100));
  for (std::size_t i = 0; i < fr.size(); ++i) {
    CHECK(fr.tangent[i].norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fr.normal[i].norm() == doctest::Approx(1.0).epsilon(1e-12));
    // n = rot(+π/2) t
    CHECK(std::abs(fr.normal[i].x() + fr.tangent[i].y()) < 1e-15);
    CHECK(std::abs(fr.normal[i].y() - fr.tangent[i].x()) < 1e-15);
    CHECK(fr.speed[i] > 0.0);
  }
}

TEST_CASE("curvature converges at second order") {
  const double e100 = circle_curvature_error(100);
  const double e200 = circle_curvature_error(200);
  const double e400 = circle_curvature_error(400);
  CHECK(std::log2(e100 / e200) >= 1.9);
  CHECK(std::log2(e200 / e400) >= 1.9);

  const double f100 = ellipse_curvature_error(100, 2.0, 1.0);
  const double f200 = ellipse_curvature_error(200, 2.0, 1.0);
  const double f400 = ellipse_curvature_error(400, 2.0, 1.0);
  CHECK(std::log2(f100 / f200) >= 1.9);
  CHECK(std::log2(f200 / f400) >= 1.9);
}

TEST_CASE("circle of radius 2") {
  for (std::size_t n : {8u, 16u, 64u, 100u}) {
    const FrenetData fr = compute_frenet(make_circle(n, 2.0));
    const double h = 2.0 * pi / static_cast<double>(n);
    for (double k : fr.curvature) CHECK(std::abs(k - 0.5) <= h * h);
    CHECK(fr.length == doctest::Approx(4.0 * pi).epsilon(1e-12));
  }
}

TEST_CASE("degenerate and invalid curves are rejected") {
  // Straight segment traversed out and back: zero speed at the turning nodes.
  Points back_and_forth;
  for (double x : {0.0, 1.0, 2.0, 3.0, 4.0, 3.0, 2.0, 1.0}) back_and_forth.emplace_back(x, 0.0);
  CHECK_THROWS_AS(compute_frenet(ClosedCurve(back_and_forth)), DegenerateCurveError);

  Points two_point;
  for (int i = 0; i < 8; ++i) two_point.emplace_back(i % 2 == 0 ? 0.0 : 1.0, 0.0);
  CHECK_THROWS_AS(compute_frenet(ClosedCurve(two_point)), DegenerateCurveError);

  CHECK_THROWS_AS(ClosedCurve(Points(7, Point(0.0, 0.0))), ValidationError);

  Points coincident = make_circle(10).points();
  coincident[3] = coincident[4];
  CHECK_THROWS_AS(ClosedCurve{coincident}, DegenerateCurveError);

  Points nan_pts = make_circle(10).points();
  nan_pts[2].x() = std::nan("");
  CHECK_THROWS_AS(ClosedCurve{nan_pts}, ValidationError);
}

TEST_CASE("arclength derivative") {
  const FrenetData circle = compute_frenet(make_circle(100));
  SUBCASE("constant field gives exactly zero") {
    const Field d = arclength_derivative(Field(100, 3.25), circle);
    for (double x : d) CHECK(x == 0.0);
  }
  SUBCASE("sin on the unit circle") {
    const Field theta = parameter_nodes(100);
    Field f(100);
    for (std::size_t i = 0; i < 100; ++i) f[i] = std::sin(theta[i]);
    const Field d = arclength_derivative(f, circle);
    const double h = 2.0 * pi / 100.0;
    for (std::size_t i = 0; i < 100; ++i) CHECK(std::abs(d[i] - std::cos(theta[i])) <= h * h / 5.0);
  }
  SUBCASE("sin on an ellipse matches cos/|c_theta|") {
    const FrenetData fr = compute_frenet(make_ellipse(100, 2.0, 1.0));
    const Field theta = parameter_nodes(100);
    Field f(100);
    for (std::size_t i = 0; i < 100; ++i) f[i] = std::sin(theta[i]);
    const Field d = arclength_derivative(f, fr);
    const double h = 2.0 * pi / 100.0;
    for (std::size_t i = 0; i < 100; ++i) {
      const double s = std::sin(theta[i]);
      const double c = std::cos(theta[i]);
      const double speed = std::sqrt(4.0 * s * s + c * c);
      CHECK(std::abs(fr.speed[i] - speed) < 1e-12);
      CHECK(std::abs(d[i] - c / speed) <= h * h / 5.0);
    }
  }
  CHECK_THROWS_AS(arclength_derivative(Field(99, 0.0), circle), ValidationError);
}

TEST_CASE("curve integral") {
  CHECK(std::abs(curve_integral(Field(100, 1.0), compute_frenet(make_circle(100))) - 2.0 * pi) < 1e-10);
  // High-resolution adaptive quadrature of ∫ sqrt(4 sin² + cos²) dθ.
  CHECK(std::abs(curve_integral(Field(100, 1.0), compute_frenet(make_ellipse(100, 2.0, 1.0))) -
                 9.688448220547679) < 1e-9);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const FrenetData fr = compute_frenet(unred::testing::random_smooth_curve(rng, 200, 0.2));
    const double h = 2.0 * pi / 200.0;
    CHECK(std::abs(curve_integral(fr.curvature, fr) - 2.0 * pi) < 10.0 * h * h);
  }
  CHECK_THROWS_AS(curve_integral(Field(3, 1.0), compute_frenet(make_circle(100))), ValidationError);
}

TEST_CASE("frame equivariance properties") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(-pi, pi);
  std::uniform_int_distribution<int> shift(-60, 60);
  for (int trial = 0; trial < 25; ++trial) {
    const ClosedCurve c = unred::testing::random_smooth_curve(rng, 64, 0.3);
    const FrenetData base = compute_frenet(c);

    const double phi = angle(rng);
    const Point offset(angle(rng), angle(rng));
    const Eigen::Rotation2Dd rot(phi);
    const FrenetData rotated = compute_frenet(c.moved(phi, Point::Zero()));
    const FrenetData translated = compute_frenet(c.moved(0.0, offset));
    for (std::size_t i = 0; i < c.size(); ++i) {
      CHECK((rotated.tangent[i] - rot * base.tangent[i]).norm() < 1e-12);
      CHECK((rotated.normal[i] - rot * base.normal[i]).norm() < 1e-12);
      CHECK(std::abs(rotated.curvature[i] - base.curvature[i]) < 1e-12);
      CHECK(std::abs(rotated.speed[i] - base.speed[i]) < 1e-12);
      CHECK((translated.tangent[i] - base.tangent[i]).norm() < 1e-12);
      CHECK(std::abs(translated.curvature[i] - base.curvature[i]) < 1e-12);
      CHECK(std::abs(translated.speed[i] - base.speed[i]) < 1e-12);
    }
    CHECK(std::abs(rotated.length - base.length) < 1e-12);
    CHECK(std::abs(translated.length - base.length) < 1e-12);

    const int k = shift(rng);
    const FrenetData sh = compute_frenet(c.shifted(k));
    const std::size_t n = c.size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = static_cast<std::size_t>(((static_cast<int>(i) + k) % 64 + 64) % 64);
      CHECK(sh.tangent[i] == base.tangent[j]);
      CHECK(sh.normal[i] == base.normal[j]);
      CHECK(sh.curvature[i] == base.curvature[j]);
      CHECK(sh.speed[i] == base.speed[j]);
    }
  }
}

TEST_CASE("spline resampling") {
  const ClosedCurve up = resample_parameter(make_circle(64), 128);
  for (const Point& p : up.points()) CHECK(std::abs(p.norm() - 1.0) < 1e-5);
  const ClosedCurve same = resample_parameter(make_circle(64), 64);
  CHECK(unred::testing::max_abs_diff(same.points(), make_circle(64).points()) < 1e-12);

  const ClosedCurve uniform = resample_arclength(make_ellipse(200, 2.0, 1.0), 100);
  const FrenetData fr = compute_frenet(uniform);
  const double mean = fr.length / (2.0 * pi);
  for (double s : fr.speed) CHECK(std::abs(s / mean - 1.0) < 1e-3);
  CHECK(std::abs(fr.length - 9.688448220547679) < 1e-4);
}
