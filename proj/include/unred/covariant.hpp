#pragma once

#include "unred/curve.hpp"
#include "unred/ivp.hpp"
#include "unred/metric.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace unred {

/// Space-time lattice of n_t × n_x sites, each holding an N-node curve.
struct GridSpec {
  std::size_t n_t = 5;
  std::size_t n_x = 5;
  double dt = 0.25;
  double dx = 0.25;
  std::size_t nodes = 64;

  void validate() const;
  std::size_t sites() const noexcept { return n_t * n_x; }
};

/// Curve-valued field c(t, x) on a GridSpec lattice, stored row-major with t
/// outer and x inner.
class SpaceTimeField {
 public:
  SpaceTimeField(GridSpec grid, std::vector<ClosedCurve> curves);

  const GridSpec& grid() const noexcept { return grid_; }
  const std::vector<ClosedCurve>& curves() const noexcept { return curves_; }

  std::size_t index(std::size_t it, std::size_t ix) const;
  const ClosedCurve& at(std::size_t it, std::size_t ix) const { return curves_[index(it, ix)]; }
  void set(std::size_t it, std::size_t ix, ClosedCurve curve);

  bool is_boundary(std::size_t it, std::size_t ix) const noexcept {
    return it == 0 || ix == 0 || it + 1 == grid_.n_t || ix + 1 == grid_.n_x;
  }

 private:
  GridSpec grid_;
  std::vector<ClosedCurve> curves_;
};

/// Same curve at every site.
SpaceTimeField constant_field(const GridSpec& grid, const ClosedCurve& curve);

/// Fills the interior by node-wise transfinite (Coons) interpolation of the
/// boundary curves returned by `boundary(it, ix)`; it is called only for
/// boundary sites.
SpaceTimeField interpolate_boundary(
    const GridSpec& grid, const std::function<ClosedCurve(std::size_t, std::size_t)>& boundary);

struct Jets {
  Points c_t;
  Points c_x;
};

/// Centred differences at interior sites, first-order one-sided differences
/// on the lattice boundary, per direction.
Jets jet_fields(const SpaceTimeField& field, std::size_t it, std::size_t ix);

/// Σ_sites w_site · ½∫(h_t P h_t + h_x P h_x + v_t P v_t + v_x P v_x) ds with
/// trapezoidal weights w_site = w_t w_x dt dx (half weight on each edge of
/// the rectangle).
double discrete_action(const SpaceTimeField& field, const MetricOperator& op);

/// Per-site, per-node gradient of the discrete action.
using LatticeGradient = std::vector<Points>;

/// Exact gradient of `discrete_action` with respect to every interior curve
/// point. Boundary sites are Dirichlet data and get an exactly zero gradient.
LatticeGradient action_gradient(const SpaceTimeField& field, const MetricOperator& op);

/// Largest absolute gradient component.
double max_norm(const LatticeGradient& g);

/// Residuals of the covariant un-reduced equations at interior sites:
///   r_h = ∂_x P h_x + ∂_t P h_t − [D_θ(h_x P v_x + h_t P v_t) − κ H]
///   r_v = ∂_x P v_x + ∂_t P v_t − F^v
/// The divergence terms use centred differences between interior sites and
/// a second-order one-sided stencil at sites next to the boundary (lattices
/// with at least 5 sites in that direction). Boundary sites hold empty fields
/// and zero norms.
struct CovariantResidual {
  std::vector<Field> r_h;
  std::vector<Field> r_v;
  Field site_max_h;
  Field site_max_v;
  double max_h = 0.0;
  double max_v = 0.0;
};

CovariantResidual covariant_residual(const SpaceTimeField& field, const MetricOperator& op,
                                     const ForceSpec& force_v = ForceSpec::zero());

enum class RelaxMethod { gradient, lbfgs };

struct RelaxOptions {
  double step_size = 1.0;
  std::size_t max_iters = 20000;
  double tol = 1e-9;
  /// Residual norms are added to the trace every this many iterations (0: never).
  std::size_t residual_every = 0;
  ForceSpec force_v = ForceSpec::zero();
  /// Choose each trial step by the Barzilai-Borwein rule from the last
  /// accepted update instead of reusing the previous step. Halving on an
  /// action increase applies either way.
  bool barzilai_borwein = true;
  /// lbfgs replaces the steepest-descent direction by a limited-memory
  /// quasi-Newton one (unit trial step, same halving safeguard).
  RelaxMethod method = RelaxMethod::gradient;
  std::size_t lbfgs_memory = 10;
};

struct RelaxTraceRow {
  std::size_t iteration = 0;
  double action = 0.0;
  double gradient_norm = 0.0;
  double step_size = 0.0;
  std::optional<double> residual_h;
  std::optional<double> residual_v;
};

struct RelaxResult {
  SpaceTimeField field;
  std::vector<RelaxTraceRow> trace;
  bool converged = false;
  bool stalled = false;
  std::size_t iterations = 0;
};

/// Gradient descent c ← c − step·∇S on the interior with the boundary
/// frozen. A step that would increase the action is halved (at most 30
/// times in a row, then the descent stops with `stalled` set), so the
/// recorded actions never increase.
RelaxResult relax(SpaceTimeField field, const MetricOperator& op, const RelaxOptions& options);

/// Circles of radius r0 at t = 0 growing linearly to r1 at the last time
/// row, identical in x; the interior is the interpolated initial guess.
SpaceTimeField two_circle_field(const GridSpec& grid, double r0, double r1);

}  // namespace unred
