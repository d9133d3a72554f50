// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "unred/connection.hpp"
#include "unred/covariant.hpp"
#include "unred/currents.hpp"
#include "unred/experiment.hpp"
#include "unred/ivp.hpp"
#include "unred/metric.hpp"

#include "oracle.hpp"
#include "test_support.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace unred;
using unred::testing::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(const char* name, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("%s %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

Outcome decoupling() {
  const DecoupleResult r = cmd_decouple(ExperimentConfig{}, false);
  const auto& d = r.final_distances;
  std::ostringstream os;
  os << "final distances";
  for (double x : d) os << ' ' << fmt("%.4e", x);
  bool decreasing = d.size() == 4;
  for (std::size_t i = 1; i < d.size(); ++i) decreasing = decreasing && d[i] < d[i - 1];
  const double ratio = d.front() / d.back();
  os << "; strictly decreasing " << (decreasing ? "yes" : "no") << "; d(0.04)/d(0.001) = "
     << fmt("%.2f", ratio) << " (need >= 10)";
  return {decreasing && ratio >= 10.0, os.str()};
}

Outcome vertical_conservation() {
  const auto op = MetricOperator::sobolev(0.3);
  SimState s = make_initial_state(make_circle(100), op, {});
  const Field m_v0 = s.m_v;
  const std::size_t steps = 10000;
  std::size_t bad = 0;
  for (std::size_t k = 0; k < steps; ++k) {
    s = euler_step(s, 1e-4, op, ForceSpec::zero());
    if (std::memcmp(s.m_v.data(), m_v0.data(), m_v0.size() * sizeof(double)) != 0) ++bad;
  }
  return {bad == 0, std::to_string(steps) + " Euler steps, " + std::to_string(bad) +
                        " steps with m_v differing bitwise"};
}

Outcome pure_reparametrisation() {
  const auto op = MetricOperator::sobolev(0.3);
  const ClosedCurve circle = make_circle(100);
  SimState s = make_initial_state(circle, op, {0.0, 0.4, 0.5});
  std::size_t nonzero = 0;
  for (std::size_t k = 0; k < 1000; ++k) {
    s = euler_step(s, 0.001, op, ForceSpec::zero());
    for (double m : s.m_h) nonzero += (m != 0.0);
  }
  const CurrentsKernel kernel{};
  const double d = currents_distance(s.curve, circle, kernel);
  const double norm = currents_norm(circle, kernel);
  return {nonzero == 0 && d <= 0.05 * norm,
          "nonzero m_h entries " + std::to_string(nonzero) + "; distance at t = 1 " + fmt("%.3e", d) +
              " vs 0.05*norm " + fmt("%.3e", 0.05 * norm)};
}

Outcome operator_correctness() {
  std::mt19937_64 rng(101);
  const auto op = MetricOperator::sobolev(0.3);
  double roundtrip = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const FrenetData fr = compute_frenet(unred::testing::random_smooth_curve(rng, 100, 0.3));
    const Field f = unred::testing::random_smooth_field(rng, 100, 10);
    roundtrip = std::max(roundtrip, unred::testing::max_abs_diff(invert_operator(op, apply_operator(op, f, fr), fr), f));
  }
  const FrenetData circle = compute_frenet(make_circle(100));
  const Field theta = parameter_nodes(100);
  Field c(100), c109(100);
  for (std::size_t i = 0; i < 100; ++i) {
    c[i] = std::cos(theta[i]);
    c109[i] = 1.09 * c[i];
  }
  const double eig = std::max(unred::testing::max_abs_diff(apply_operator(op, c, circle), c109),
                              unred::testing::max_abs_diff(invert_operator(op, c109, circle), c));
  return {roundtrip <= 1e-12 && eig <= 1e-10,
          "roundtrip max error " + fmt("%.2e", roundtrip) + " (<= 1e-12); eigenfunction error " +
              fmt("%.2e", eig) + " (<= 1e-10)"};
}

Outcome geometry_convergence() {
  std::vector<double> err;
  for (std::size_t n : {100u, 200u, 400u}) {
    const FrenetData fr = compute_frenet(make_circle(n));
    double e = 0.0;
    for (double k : fr.curvature) e = std::max(e, std::abs(k - 1.0));
    err.push_back(e);
  }
  const double o1 = std::log2(err[0] / err[1]);
  const double o2 = std::log2(err[1] / err[2]);
  return {err[0] <= 2e-3 && o1 >= 1.9 && o2 >= 1.9,
          "kappa error " + fmt("%.3e", err[0]) + " at N=100; orders " + fmt("%.3f", o1) + ", " +
              fmt("%.3f", o2)};
}

Outcome currents_invariances() {
  std::mt19937_64 rng(103);
  std::uniform_int_distribution<int> size(24, 60);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const CurrentsKernel k{};
  double self = 0.0, rigid = 0.0, triangle = 0.0;
  std::size_t relabel_mismatch = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const ClosedCurve a = unred::testing::random_smooth_curve(rng, size(rng), 0.3 * u(rng));
    const ClosedCurve b = unred::testing::random_smooth_curve(rng, size(rng), 0.3 * u(rng));
    const ClosedCurve c = unred::testing::random_smooth_curve(rng, size(rng), 0.3 * u(rng));
    const double ab = currents_distance(a, b, k);
    const double bc = currents_distance(b, c, k);
    const double ac = currents_distance(a, c, k);
    self = std::max({self, currents_distance(a, a, k), currents_distance(b, b, k), currents_distance(c, c, k)});
    triangle = std::max(triangle, ac - (ab + bc));
    const double angle = pi * u(rng);
    const Point off(2.0 * u(rng), 2.0 * u(rng));
    rigid = std::max(rigid, std::abs(currents_distance(a.moved(angle, off), b.moved(angle, off), k) - ab));
    const auto shift = static_cast<std::ptrdiff_t>(trial % 17 + 1);
    relabel_mismatch += currents_distance(a.shifted(shift), b.shifted(-shift), k) != ab;
  }
  return {self == 0.0 && rigid <= 1e-10 && relabel_mismatch == 0 && triangle <= 1e-10,
          "100 triples: max self-distance " + fmt("%.1e", self) + ", rigid-motion change " +
              fmt("%.2e", rigid) + ", relabel mismatches " + std::to_string(relabel_mismatch) +
              ", worst triangle violation " + fmt("%.2e", std::max(0.0, triangle))};
}

SpaceTimeField random_smooth_field(std::mt19937_64& rng, const GridSpec& g) {
  std::vector<ClosedCurve> corner;
  for (int i = 0; i < 4; ++i) corner.push_back(unred::testing::random_smooth_curve(rng, g.nodes, 0.2));
  SpaceTimeField f = interpolate_boundary(g, [&](std::size_t it, std::size_t ix) {
    const double s = double(it) / double(g.n_t - 1);
    const double r = double(ix) / double(g.n_x - 1);
    Points p(g.nodes);
    for (std::size_t k = 0; k < g.nodes; ++k) {
      p[k] = (1 - s) * (1 - r) * corner[0][k] + s * (1 - r) * corner[1][k] +
             (1 - s) * r * corner[2][k] + s * r * corner[3][k];
    }
    return ClosedCurve(p);
  });
  for (std::size_t it = 1; it + 1 < g.n_t; ++it) {
    for (std::size_t ix = 1; ix + 1 < g.n_x; ++ix) {
      const Points d = unred::testing::random_smooth_vectors(rng, g.nodes);
      Points p = f.at(it, ix).points();
      for (std::size_t k = 0; k < g.nodes; ++k) p[k] += 0.02 * d[k];
      f.set(it, ix, ClosedCurve(p));
    }
  }
  return f;
}

Outcome gradient_check() {
  std::mt19937_64 rng(107);
  const GridSpec g{5, 5, 0.25, 0.25, 64};
  const SpaceTimeField f = random_smooth_field(rng, g);
  std::uniform_int_distribution<std::size_t> interior(1, 3);
  std::uniform_int_distribution<std::size_t> node(0, 63);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (const auto& op : {MetricOperator::sobolev(0.3), MetricOperator::sobolev(0.3, SobolevMode::stencil)}) {
    const LatticeGradient grad = action_gradient(f, op);
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t it = interior(rng), ix = interior(rng), k = node(rng);
      const Point dir = Point(normal(rng), normal(rng)).normalized();
      auto action_at = [&](double e) {
        SpaceTimeField h = f;
        Points p = h.at(it, ix).points();
        p[k] += e * dir;
        h.set(it, ix, ClosedCurve(p));
        return discrete_action(h, op);
      };
      const double fd = (action_at(1e-6) - action_at(-1e-6)) / 2e-6;
      const double exact = grad[f.index(it, ix)][k].dot(dir);
      worst = std::max(worst, std::abs(fd - exact) / std::abs(exact));
    }
  }
  return {worst <= 1e-5, "20 points x 2 Sobolev discretisations, worst relative error " + fmt("%.2e", worst)};
}

Outcome relaxation() {
  std::ostringstream os;
  ExperimentConfig constant;
  constant.relax_boundary = "constant";
  const RelaxRun c = cmd_relax(constant, false);
  const double const_action = c.result.trace.back().action;
  os << "constant boundary action " << fmt("%.2e", const_action) << " (< 1e-8)";

  const RelaxRun two = cmd_relax(ExperimentConfig{}, false);
  bool monotone = true;
  for (std::size_t i = 1; i < two.result.trace.size(); ++i) {
    monotone = monotone && two.result.trace[i].action <= two.result.trace[i - 1].action;
  }
  os << "; two-circle trace monotone " << (monotone ? "yes" : "no") << " over "
     << two.result.trace.size() << " iterates";

  std::vector<double> rh, rv;
  bool converged = true;
  for (std::size_t level = 0; level < 3; ++level) {
    ExperimentConfig cfg;
    const std::size_t scale = std::size_t(1) << level;
    cfg.relax_n_t = 4 * scale + 1;
    cfg.relax_n_x = 4 * scale + 1;
    cfg.relax_nodes = 64 * scale;
    cfg.relax_dt = 0.25 / double(scale);
    cfg.relax_dx = 0.25 / double(scale);
    cfg.relax_residual_every = 0;
    cfg.relax_method = "lbfgs";
    const RelaxRun r = cmd_relax(cfg, false);
    converged = converged && r.result.converged;
    rh.push_back(r.final_residual.max_h);
    rv.push_back(r.final_residual.max_v);
  }
  const bool refines = rh[1] < rh[0] && rh[2] < rh[1] && rv[1] < rv[0] && rv[2] < rv[1];
  os << "; relaxed residual_h " << fmt("%.3e", rh[0]) << ", " << fmt("%.3e", rh[1]) << ", "
     << fmt("%.3e", rh[2]) << ", residual_v " << fmt("%.2e", rv[0]) << ", " << fmt("%.2e", rv[1])
     << ", " << fmt("%.2e", rv[2]) << " (5x5x64, 9x9x128, 17x17x256 relaxed by L-BFGS; converged "
     << (converged ? "yes" : "no") << ")";
  return {const_action < 1e-8 && monotone && converged && refines, os.str()};
}

Outcome rhs_oracle() {
  std::mt19937_64 rng(109);
  const auto op = MetricOperator::sobolev(0.3);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const ClosedCurve c = unred::testing::random_smooth_curve(rng, 100, 0.25);
    const FrenetData fr = compute_frenet(c);
    const SimState s{c, apply_operator(op, unred::testing::random_smooth_field(rng, 100, 6), fr),
                     apply_operator(op, unred::testing::random_smooth_field(rng, 100, 6), fr), 0.0};
    const ClassicalRhs r = classical_rhs(s, op, ForceSpec::zero());
    oracle::Curve oc;
    for (const auto& p : c.points()) {
      oc.x.push_back(p.x());
      oc.y.push_back(p.y());
    }
    const oracle::Rhs o = oracle::rhs(oracle::Op::sobolev, 0.3, oc, s.m_h, s.m_v, 0.0);
    for (std::size_t i = 0; i < 100; ++i) {
      worst = std::max({worst, std::abs(r.dm_h[i] - o.dm_h[i]), std::abs(r.dm_v[i] - o.dm_v[i]),
                        std::abs(r.dc[i].x() - o.dcx[i]), std::abs(r.dc[i].y() - o.dcy[i])});
    }
  }
  return {worst <= 1e-10, "10 random states, max deviation from explicit-DFT oracle " + fmt("%.2e", worst)};
}

}  // namespace

int main() {
  run("decoupling", decoupling);
  run("vertical conservation", vertical_conservation);
  run("pure reparametrisation", pure_reparametrisation);
  run("operator correctness", operator_correctness);
  run("geometry convergence", geometry_convergence);
  run("currents invariances", currents_invariances);
  run("covariant gradient check", gradient_check);
  run("covariant relaxation", relaxation);
  run("rhs oracle", rhs_oracle);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
