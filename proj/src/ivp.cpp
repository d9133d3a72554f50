#include "unred/ivp.hpp"

#include "unred/connection.hpp"
#include "unred/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace unred {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Empty string when every entry is finite and within the blow-up threshold.
std::string field_problem(std::span<const double> f) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f[i])) return "non-finite value at node " + std::to_string(i);
    if (std::abs(f[i]) > blow_up_threshold) {
      return "magnitude " + std::to_string(f[i]) + " at node " + std::to_string(i);
    }
  }
  return {};
}

std::string points_problem(std::span<const Point> p) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!p[i].allFinite()) return "non-finite value at node " + std::to_string(i);
    if (p[i].cwiseAbs().maxCoeff() > blow_up_threshold) {
      return "magnitude " + std::to_string(p[i].cwiseAbs().maxCoeff()) + " at node " +
             std::to_string(i);
    }
  }
  return {};
}

}  // namespace

void validate(const SimState& state) {
  const std::size_t n = state.curve.size();
  if (state.m_h.size() != n || state.m_v.size() != n) {
    throw ValidationError("state momenta must have " + std::to_string(n) + " nodes");
  }
  for (const auto* f : {&state.m_h, &state.m_v}) {
    for (double x : *f) {
      if (!std::isfinite(x)) throw ValidationError("state momentum is not finite");
    }
  }
  if (!std::isfinite(state.time)) throw ValidationError("state time is not finite");
}

Field ForceSpec::evaluate(const SimState& state) const {
  const std::size_t n = state.curve.size();
  return std::visit(overloaded{
                        [&](const Zero&) { return Field(n, 0.0); },
                        [&](const Constant& c) { return Field(n, c.value); },
                        [&](const Custom& c) {
                          Field f = c.fn(state);
                          if (f.size() != n) {
                            throw ValidationError("custom force returned " +
                                                  std::to_string(f.size()) + " values for " +
                                                  std::to_string(n) + " nodes");
                          }
                          for (double x : f) {
                            if (!std::isfinite(x)) {
                              throw ValidationError("custom force returned a non-finite value");
                            }
                          }
                          return f;
                        },
                    },
                    v_);
}

std::string ForceSpec::describe() const {
  return std::visit(overloaded{
                        [](const Zero&) { return std::string("zero"); },
                        [](const Constant& c) {
                          std::ostringstream os;
                          os.precision(17);
                          os << "constant(" << c.value << ")";
                          return os.str();
                        },
                        [](const Custom&) { return std::string("custom"); },
                    },
                    v_);
}

ClassicalRhs classical_rhs(const SimState& state, const MetricOperator& op, const ForceSpec& force) {
  validate(state);
  const FrenetData frenet = compute_frenet(state.curve);
  const std::size_t n = frenet.size();
  const Field h_t = invert_operator(op, state.m_h, frenet);
  const Field v_t = invert_operator(op, state.m_v, frenet);

  Field flux(n);
  for (std::size_t i = 0; i < n; ++i) flux[i] = h_t[i] * state.m_v[i];
  const Field transport = arclength_derivative(flux, frenet);

  ClassicalRhs rhs;
  rhs.dm_h.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double energy = 0.5 * h_t[i] * state.m_h[i];
    rhs.dm_h[i] = transport[i] - frenet.curvature[i] * energy;
  }
  rhs.dm_v = force.evaluate(state);
  rhs.dc = reconstruct(VelocityDecomposition{v_t, h_t}, frenet);
  return rhs;
}

SimState euler_step(const SimState& state, double dt, const MetricOperator& op,
                    const ForceSpec& force) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("time step must be positive");
  const ClassicalRhs rhs = classical_rhs(state, op, force);
  const std::size_t n = state.curve.size();

  Points points(n);
  for (std::size_t i = 0; i < n; ++i) points[i] = state.curve[i] + dt * rhs.dc[i];
  Field m_h(n);
  for (std::size_t i = 0; i < n; ++i) m_h[i] = state.m_h[i] + dt * rhs.dm_h[i];
  Field m_v = state.m_v;
  if (!force.is_zero()) {
    for (std::size_t i = 0; i < n; ++i) m_v[i] += dt * rhs.dm_v[i];
  }

  if (auto p = points_problem(points); !p.empty()) throw BlowUpError("field 'curve': " + p);
  if (auto p = field_problem(m_h); !p.empty()) throw BlowUpError("field 'm_h': " + p);
  if (auto p = field_problem(m_v); !p.empty()) throw BlowUpError("field 'm_v': " + p);

  return SimState{ClosedCurve(std::move(points)), std::move(m_h), std::move(m_v), state.time + dt};
}

Trajectory simulate(const SimState& initial, double dt, std::size_t steps, const MetricOperator& op,
                    const ForceSpec& force, const Observer& observer) {
  if (steps == 0) throw ValidationError("simulate needs at least one step");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("time step must be positive");
  validate(initial);

  Trajectory traj;
  auto record = [&](std::size_t step, const SimState& s) {
    traj.steps.push_back(step);
    traj.snapshots.push_back(s);
    if (observer.on_snapshot) observer.on_snapshot(step, s);
  };

  record(0, initial);
  SimState state = initial;
  for (std::size_t step = 1; step <= steps; ++step) {
    try {
      state = euler_step(state, dt, op, force);
    } catch (const Error& e) {
      rethrow_with_context(e, "step " + std::to_string(step));
    }
    const bool scheduled = observer.every != 0 && step % observer.every == 0;
    if (scheduled || step == steps) record(step, state);
  }
  return traj;
}

SimState make_initial_state(const ClosedCurve& curve, const MetricOperator& op,
                            const InitialVelocity& velocity) {
  if (!(velocity.bump_width > 0.0)) throw ValidationError("bump width must be positive");
  const FrenetData frenet = compute_frenet(curve);
  const Field theta = parameter_nodes(curve.size());
  Field h_t(curve.size());
  for (std::size_t i = 0; i < h_t.size(); ++i) {
    const double d = (theta[i] - std::numbers::pi) / velocity.bump_width;
    h_t[i] = velocity.bump_amplitude * std::exp(-d * d);
  }
  const Field v_t(curve.size(), velocity.v_const);
  SimState s{curve, apply_operator(op, h_t, frenet), apply_operator(op, v_t, frenet), 0.0};
  return s;
}

}  // namespace unred
