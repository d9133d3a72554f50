#pragma once

#include "unred/curve.hpp"
#include "unred/metric.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace unred {

/// State of the classical un-reduced problem. The momenta m_h = P h_t and
/// m_v = P v_t are evolved directly; velocities are recovered by inverting P.
struct SimState {
  ClosedCurve curve;
  Field m_h;
  Field m_v;
  double time = 0.0;
};

/// Throws ValidationError unless all fields match the curve and are finite.
void validate(const SimState& state);

/// Vertical force F^v driving the reparametrisation momentum.
class ForceSpec {
 public:
  struct Zero {};
  struct Constant {
    double value = 0.0;
  };
  struct Custom {
    std::function<Field(const SimState&)> fn;
  };
  using Variant = std::variant<Zero, Constant, Custom>;

  ForceSpec() = default;
  explicit ForceSpec(Variant v) : v_(std::move(v)) {}

  static ForceSpec zero() { return ForceSpec(Zero{}); }
  static ForceSpec constant(double value) { return ForceSpec(Constant{value}); }
  static ForceSpec custom(std::function<Field(const SimState&)> fn) {
    return ForceSpec(Custom{std::move(fn)});
  }

  bool is_zero() const noexcept { return std::holds_alternative<Zero>(v_); }
  const Variant& variant() const noexcept { return v_; }

  /// Per-node force on `state`; a Custom result is checked for length and
  /// finiteness.
  Field evaluate(const SimState& state) const;

  /// Short label for metadata: "zero", "constant(<value>)" or "custom".
  std::string describe() const;

 private:
  Variant v_ = Zero{};
};

struct ClassicalRhs {
  Field dm_h;
  Field dm_v;
  Points dc;
};

/// Right-hand side of the time-only un-reduced equations:
///   ∂_t m_h = D_θ(h_t m_v) − κ H,   H = ½ h_t m_h,
///   ∂_t m_v = F^v,
///   ∂_t c   = v_t t + h_t n.
ClassicalRhs classical_rhs(const SimState& state, const MetricOperator& op, const ForceSpec& force);

/// Magnitude above which a field is treated as blown up.
inline constexpr double blow_up_threshold = 1e8;

/// One explicit Euler step. With a zero force m_v is copied unchanged.
SimState euler_step(const SimState& state, double dt, const MetricOperator& op,
                    const ForceSpec& force);

/// Snapshot schedule for `simulate`: the initial state, every `every`-th
/// step and the final step are recorded (every = 0 records only the ends).
struct Observer {
  std::size_t every = 1;
  std::function<void(std::size_t step, const SimState&)> on_snapshot;
};

struct Trajectory {
  std::vector<std::size_t> steps;
  std::vector<SimState> snapshots;

  const SimState& final_state() const { return snapshots.back(); }
};

Trajectory simulate(const SimState& initial, double dt, std::size_t steps, const MetricOperator& op,
                    const ForceSpec& force, const Observer& observer = {});

/// Initial velocities of the decoupling experiment.
struct InitialVelocity {
  double bump_amplitude = 0.5;
  double bump_width = 0.4;
  double v_const = 0.5;
};

/// h_t(θ) = a·exp(−(θ−π)²/w²), v_t ≡ v_const, converted to momenta with P
/// evaluated on `curve`.
SimState make_initial_state(const ClosedCurve& curve, const MetricOperator& op,
                            const InitialVelocity& velocity);

}  // namespace unred
