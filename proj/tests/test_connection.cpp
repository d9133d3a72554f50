#include "unred/connection.hpp"
#include "unred/error.hpp"

#include <Eigen/Geometry>

#include "doctest.h"
#include "test_support.hpp"

#include <cmath>

using namespace unred;

TEST_CASE("constant translation of the unit circle") {
  const std::size_t n = 100;
  const FrenetData fr = compute_frenet(make_circle(n));
  const Points u(n, Point(1.0, 0.0));
  const auto d = decompose(u, fr);
  const Field theta = parameter_nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(std::abs(d.v[i] + std::sin(theta[i])) < 1e-12);
    CHECK(std::abs(d.h[i] + std::cos(theta[i])) < 1e-12);
  }
}

TEST_CASE("decompose and reconstruct are inverse") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const FrenetData fr = compute_frenet(unred::testing::random_smooth_curve(rng, 64, 0.3));
    const Points u = unred::testing::random_smooth_vectors(rng, 64);
    const auto d = decompose(u, fr);
    CHECK(unred::testing::max_abs_diff(reconstruct(d, fr), u) < 1e-14);

    const VelocityDecomposition vh{unred::testing::random_smooth_field(rng, 64),
                                   unred::testing::random_smooth_field(rng, 64)};
    const auto again = decompose(reconstruct(vh, fr), fr);
    CHECK(unred::testing::max_abs_diff(again.v, vh.v) < 1e-14);
    CHECK(unred::testing::max_abs_diff(again.h, vh.h) < 1e-14);

    for (std::size_t i = 0; i < 64; ++i) {
      CHECK(std::abs(u[i].squaredNorm() - d.v[i] * d.v[i] - d.h[i] * d.h[i]) < 1e-13);
      CHECK(std::abs(fr.tangent[i].dot(fr.normal[i])) < 1e-15);
    }
  }
}

TEST_CASE("decomposition commutes with relabelling and rotation") {
  std::mt19937_64 rng(23);
  const ClosedCurve c = unred::testing::random_smooth_curve(rng, 64, 0.2);
  const Points u = unred::testing::random_smooth_vectors(rng, 64);
  const auto d = decompose(u, compute_frenet(c));

  const ClosedCurve s = c.shifted(5);
  Points us(64);
  for (std::size_t i = 0; i < 64; ++i) us[i] = u[(i + 5) % 64];
  const auto ds = decompose(us, compute_frenet(s));
  for (std::size_t i = 0; i < 64; ++i) {
    CHECK(ds.v[i] == d.v[(i + 5) % 64]);
    CHECK(ds.h[i] == d.h[(i + 5) % 64]);
  }

  const double angle = 0.7;
  const Eigen::Rotation2Dd rot(angle);
  Points ur(64);
  for (std::size_t i = 0; i < 64; ++i) ur[i] = rot * u[i];
  const auto dr = decompose(ur, compute_frenet(c.moved(angle, Point(2.0, -1.0))));
  CHECK(unred::testing::max_abs_diff(dr.v, d.v) < 1e-12);
  CHECK(unred::testing::max_abs_diff(dr.h, d.h) < 1e-12);
}

TEST_CASE("size mismatch is rejected") {
  const FrenetData fr = compute_frenet(make_circle(16));
  CHECK_THROWS_AS(decompose(Points(15, Point::Zero()), fr), ValidationError);
  CHECK_THROWS_AS(reconstruct({Field(16), Field(15)}, fr), ValidationError);
}
