#include "unred/currents.hpp"

#include "unred/error.hpp"

#include <algorithm>
#include <cmath>

namespace unred {

namespace {

struct Edges {
  Points mid;
  Points vec;
};

Edges edges_of(const ClosedCurve& c) {
  const std::size_t n = c.size();
  Edges e{Points(n), Points(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = c[i];
    const Point& b = c[(i + 1) % n];
    e.vec[i] = b - a;
    e.mid[i] = 0.5 * (a + b);
    if (e.vec[i].squaredNorm() == 0.0) {
      throw DegenerateCurveError("currents: zero-length edge at node " + std::to_string(i));
    }
  }
  return e;
}

}  // namespace

double currents_inner(const ClosedCurve& c1, const ClosedCurve& c2, const CurrentsKernel& k) {
  if (!(k.sigma > 0.0)) throw ValidationError("currents kernel width must be positive");
  const Edges a = edges_of(c1);
  const Edges b = edges_of(c2);
  const double inv_s2 = 1.0 / (k.sigma * k.sigma);

  std::vector<double> terms;
  terms.reserve(a.mid.size() * b.mid.size());
  for (std::size_t i = 0; i < a.mid.size(); ++i) {
    for (std::size_t j = 0; j < b.mid.size(); ++j) {
      const double dx = a.mid[i].x() - b.mid[j].x();
      const double dy = a.mid[i].y() - b.mid[j].y();
      const double r2 = dx * dx + dy * dy;
      const double dot = a.vec[i].x() * b.vec[j].x() + a.vec[i].y() * b.vec[j].y();
      terms.push_back(std::exp(-r2 * inv_s2) * dot);
    }
  }
  std::sort(terms.begin(), terms.end(), [](double x, double y) {
    const double ax = std::abs(x);
    const double ay = std::abs(y);
    return ax < ay || (ax == ay && x < y);
  });
  double sum = 0.0;
  for (double t : terms) sum += t;
  return sum;
}

double currents_distance(const ClosedCurve& c1, const ClosedCurve& c2, const CurrentsKernel& k) {
  const double aa = currents_inner(c1, c1, k);
  const double bb = currents_inner(c2, c2, k);
  const double ab = currents_inner(c1, c2, k);
  return std::sqrt(std::max(0.0, (aa + bb) - 2.0 * ab));
}

double currents_norm(const ClosedCurve& c, const CurrentsKernel& k) {
  return std::sqrt(std::max(0.0, currents_inner(c, c, k)));
}

}  // namespace unred
