#include "unred/covariant.hpp"

#include "unred/connection.hpp"
#include "unred/error.hpp"
#include "unred/spectral.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <string>

namespace unred {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Point transpose_quarter(const Point& p) { return Point(p.y(), -p.x()); }

double edge_weight(std::size_t i, std::size_t n) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; }

double site_weight(const GridSpec& g, std::size_t it, std::size_t ix) {
  return edge_weight(it, g.n_t) * edge_weight(ix, g.n_x) * g.dt * g.dx;
}

// First derivative of a lattice quantity along one axis: centred inside,
// one-sided at the ends. Returns the (forward, backward, scale) stencil.
struct AxisStencil {
  std::size_t plus;
  std::size_t minus;
  double inv_step;
};

AxisStencil axis_stencil(std::size_t i, std::size_t n, double h) {
  if (i == 0) return {1, 0, 1.0 / h};
  if (i + 1 == n) return {n - 1, n - 2, 1.0 / h};
  return {i + 1, i - 1, 0.5 / h};
}

// Divergence stencil at an interior site. Centred where both neighbours are
// interior; next to the boundary a second-order one-sided stencil over
// interior sites is used so the first-order boundary jets stay out of it.
// With fewer than three interior sites the centred stencil is the only option.
struct AxisDivergence {
  std::size_t at[3];
  double w[3];
};

AxisDivergence divergence_stencil(std::size_t i, std::size_t n, double h) {
  const bool roomy = n >= 5;
  if (roomy && i == 1) return {{1, 2, 3}, {-1.5 / h, 2.0 / h, -0.5 / h}};
  if (roomy && i + 2 == n) return {{n - 2, n - 3, n - 4}, {1.5 / h, -2.0 / h, 0.5 / h}};
  return {{i + 1, i - 1, i}, {0.5 / h, -0.5 / h, 0.0}};
}

Points difference(const ClosedCurve& plus, const ClosedCurve& minus, double scale) {
  Points out(plus.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = (plus[k] - minus[k]) * scale;
  return out;
}

// ½ Σ f (P f) s Δθ and its partial derivatives with respect to the field f,
// the node speeds s, the curvature κ and the total length L.
struct QuadraticTerms {
  double energy = 0.0;
  Field d_f;
  Field d_speed;
  Field d_curvature;  // empty unless the operator depends on κ
};

QuadraticTerms quadratic_terms(const MetricOperator& op, const Field& f, const FrenetData& fr) {
  const std::size_t n = f.size();
  const double h = fr.spacing();
  QuadraticTerms q;
  q.d_f.assign(n, 0.0);
  q.d_speed.assign(n, 0.0);

  std::visit(
      overloaded{
          [&](const L2Metric&) {
            for (std::size_t i = 0; i < n; ++i) {
              q.energy += 0.5 * f[i] * f[i] * fr.speed[i] * h;
              q.d_f[i] = f[i] * fr.speed[i] * h;
              q.d_speed[i] = 0.5 * f[i] * f[i] * h;
            }
          },
          [&](const CurvatureWeightedMetric& c) {
            q.d_curvature.assign(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
              const double k = fr.curvature[i];
              const double w = 1.0 + c.weight * k * k;
              q.energy += 0.5 * w * f[i] * f[i] * fr.speed[i] * h;
              q.d_f[i] = w * f[i] * fr.speed[i] * h;
              q.d_speed[i] = 0.5 * w * f[i] * f[i] * h;
              q.d_curvature[i] = c.weight * k * f[i] * f[i] * fr.speed[i] * h;
            }
          },
          [&](const SobolevMetric& s) {
            const double a2 = s.length_scale * s.length_scale;
            if (s.mode == SobolevMode::stencil) {
              for (std::size_t i = 0; i < n; ++i) {
                const std::size_t ip = (i + 1) % n;
                const std::size_t im = (i + n - 1) % n;
                const double s_plus = 0.5 * (fr.speed[i] + fr.speed[ip]);
                const double s_minus = 0.5 * (fr.speed[i] + fr.speed[im]);
                const double jump = f[ip] - f[i];
                q.energy += 0.5 * f[i] * f[i] * fr.speed[i] * h + 0.5 * a2 * jump * jump / (s_plus * h);
                q.d_f[i] = f[i] * fr.speed[i] * h +
                           a2 * ((f[i] - f[ip]) / s_plus + (f[i] - f[im]) / s_minus) / h;
                // Edge (i, i+1) energy depends on s_i and s_{i+1} through s_plus.
                const double d_edge = -0.5 * a2 * jump * jump / (s_plus * s_plus * h) * 0.5;
                q.d_speed[i] += 0.5 * f[i] * f[i] * h + d_edge;
                q.d_speed[ip] += d_edge;
              }
              return;
            }
            const MetricOperator plain(s);
            const Field pf = apply_operator(plain, f, fr);
            Field wf(n);
            for (std::size_t i = 0; i < n; ++i) wf[i] = f[i] * fr.speed[i] * h;
            const Field pwf = apply_operator(plain, wf, fr);
            for (std::size_t i = 0; i < n; ++i) {
              q.energy += 0.5 * wf[i] * pf[i];
              q.d_f[i] = 0.5 * (fr.speed[i] * h * pf[i] + pwf[i]);
              q.d_speed[i] = 0.5 * f[i] * pf[i] * h;
            }
            if (!s.reference_length) {
              // dP/dL has symbol −2A²(2πk)²/L³; L = Σ s_i Δθ.
              const double length = fr.length;
              const Field dpf = spectral::fourier_multiply(f, [&](std::size_t k) {
                const double wave = 2.0 * std::numbers::pi * static_cast<double>(k);
                return -2.0 * a2 * wave * wave / (length * length * length);
              });
              double d_length = 0.0;
              for (std::size_t i = 0; i < n; ++i) d_length += 0.5 * wf[i] * dpf[i];
              for (std::size_t i = 0; i < n; ++i) q.d_speed[i] += d_length * h;
            }
          },
      },
      op.variant());
  return q;
}

struct SiteGradient {
  double energy = 0.0;
  Points d_jet;    // ∂E/∂u
  Points d_curve;  // ∂E/∂c with u held fixed
};

// Energy ½∫(v P v + h P h) ds of a jet u at one site, with its gradient.
SiteGradient site_gradient(const ClosedCurve& curve, const FrenetData& fr, const Points& u,
                           const MetricOperator& op) {
  const std::size_t n = curve.size();
  const double h = fr.spacing();
  const VelocityDecomposition d = decompose(u, fr);
  const QuadraticTerms qv = quadratic_terms(op, d.v, fr);
  const QuadraticTerms qh = quadratic_terms(op, d.h, fr);

  SiteGradient out;
  out.energy = qv.energy + qh.energy;
  out.d_jet.resize(n);
  Points d_tangent(n);
  Field d_speed(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.d_jet[i] = qv.d_f[i] * fr.tangent[i] + qh.d_f[i] * fr.normal[i];
    d_tangent[i] = qv.d_f[i] * u[i] + qh.d_f[i] * transpose_quarter(u[i]);
    d_speed[i] = qv.d_speed[i] + qh.d_speed[i];
  }

  if (!qv.d_curvature.empty()) {
    // κ_i = (t_{i+1} − t_{i−1}) · n_i / (2Δθ s_i), n_i = J t_i.
    for (std::size_t i = 0; i < n; ++i) {
      const double g = qv.d_curvature[i] + qh.d_curvature[i];
      const std::size_t ip = (i + 1) % n;
      const std::size_t im = (i + n - 1) % n;
      const double scale = 1.0 / (2.0 * h * fr.speed[i]);
      const Point chord = (fr.tangent[ip] - fr.tangent[im]) * scale;
      d_tangent[ip] += g * scale * fr.normal[i];
      d_tangent[im] -= g * scale * fr.normal[i];
      d_tangent[i] += transpose_quarter(g * chord);
      d_speed[i] -= g * fr.curvature[i] / fr.speed[i];
    }
  }

  // t = c'/|c'|, s = |c'|.
  Points d_cprime(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point& t = fr.tangent[i];
    d_cprime[i] = (d_tangent[i] - t * t.dot(d_tangent[i])) / fr.speed[i] + t * d_speed[i];
  }
  // c' = D c with D antisymmetric, so ∂E/∂c = −D(∂E/∂c').
  out.d_curve = spectral::periodic_derivative(std::span<const Point>(d_cprime));
  for (auto& p : out.d_curve) p = -p;
  return out;
}

double jet_energy(const Points& u, const FrenetData& fr, const MetricOperator& op) {
  const VelocityDecomposition d = decompose(u, fr);
  const Field pv = apply_operator(op, d.v, fr);
  const Field ph = apply_operator(op, d.h, fr);
  Field density(fr.size());
  for (std::size_t i = 0; i < density.size(); ++i) {
    density[i] = 0.5 * (d.v[i] * pv[i] + d.h[i] * ph[i]);
  }
  return curve_integral(density, fr);
}

FrenetData site_frenet(const SpaceTimeField& field, std::size_t it, std::size_t ix) {
  try {
    return compute_frenet(field.at(it, ix));
  } catch (const Error& e) {
    rethrow_with_context(e, "site (" + std::to_string(it) + ", " + std::to_string(ix) + ")");
  }
}

}  // namespace

void GridSpec::validate() const {
  if (n_t < 3 || n_x < 3) {
    throw ValidationError("space-time grid needs at least 3 sites per direction, got " +
                          std::to_string(n_t) + " x " + std::to_string(n_x));
  }
  if (!(dt > 0.0) || !(dx > 0.0)) throw ValidationError("grid spacings must be positive");
  if (nodes < ClosedCurve::min_nodes || nodes % 2 != 0) {
    throw ValidationError("curve node count must be even and at least " +
                          std::to_string(ClosedCurve::min_nodes));
  }
}

SpaceTimeField::SpaceTimeField(GridSpec grid, std::vector<ClosedCurve> curves)
    : grid_(grid), curves_(std::move(curves)) {
  grid_.validate();
  if (curves_.size() != grid_.sites()) {
    throw ValidationError("space-time field needs " + std::to_string(grid_.sites()) +
                          " curves, got " + std::to_string(curves_.size()));
  }
  for (std::size_t i = 0; i < curves_.size(); ++i) {
    if (curves_[i].size() != grid_.nodes) {
      throw ValidationError("curve at site " + std::to_string(i) + " has " +
                            std::to_string(curves_[i].size()) + " nodes, expected " +
                            std::to_string(grid_.nodes));
    }
  }
}

std::size_t SpaceTimeField::index(std::size_t it, std::size_t ix) const {
  if (it >= grid_.n_t || ix >= grid_.n_x) {
    throw ValidationError("lattice index (" + std::to_string(it) + ", " + std::to_string(ix) +
                          ") out of range");
  }
  return it * grid_.n_x + ix;
}

void SpaceTimeField::set(std::size_t it, std::size_t ix, ClosedCurve curve) {
  if (curve.size() != grid_.nodes) throw ValidationError("curve node count does not match grid");
  curves_[index(it, ix)] = std::move(curve);
}

SpaceTimeField constant_field(const GridSpec& grid, const ClosedCurve& curve) {
  grid.validate();
  return SpaceTimeField(grid, std::vector<ClosedCurve>(grid.sites(), curve));
}

SpaceTimeField interpolate_boundary(
    const GridSpec& grid, const std::function<ClosedCurve(std::size_t, std::size_t)>& boundary) {
  grid.validate();
  const std::size_t nt = grid.n_t;
  const std::size_t nx = grid.n_x;
  std::vector<std::optional<ClosedCurve>> b(grid.sites());
  for (std::size_t it = 0; it < nt; ++it) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      if (it == 0 || ix == 0 || it + 1 == nt || ix + 1 == nx) {
        b[it * nx + ix] = boundary(it, ix);
        if (b[it * nx + ix]->size() != grid.nodes) {
          throw ValidationError("boundary curve at site (" + std::to_string(it) + ", " +
                                std::to_string(ix) + ") has " +
                                std::to_string(b[it * nx + ix]->size()) + " nodes, expected " +
                                std::to_string(grid.nodes));
        }
      }
    }
  }
  auto B = [&](std::size_t it, std::size_t ix) -> const ClosedCurve& { return *b[it * nx + ix]; };

  std::vector<ClosedCurve> curves;
  curves.reserve(grid.sites());
  for (std::size_t it = 0; it < nt; ++it) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      if (b[it * nx + ix]) {
        curves.push_back(*b[it * nx + ix]);
        continue;
      }
      const double s = static_cast<double>(it) / static_cast<double>(nt - 1);
      const double r = static_cast<double>(ix) / static_cast<double>(nx - 1);
      Points pts(grid.nodes);
      for (std::size_t k = 0; k < grid.nodes; ++k) {
        pts[k] = (1 - s) * B(0, ix)[k] + s * B(nt - 1, ix)[k] + (1 - r) * B(it, 0)[k] +
                 r * B(it, nx - 1)[k] -
                 ((1 - s) * (1 - r) * B(0, 0)[k] + (1 - s) * r * B(0, nx - 1)[k] +
                  s * (1 - r) * B(nt - 1, 0)[k] + s * r * B(nt - 1, nx - 1)[k]);
      }
      curves.emplace_back(std::move(pts));
    }
  }
  return SpaceTimeField(grid, std::move(curves));
}

Jets jet_fields(const SpaceTimeField& field, std::size_t it, std::size_t ix) {
  const GridSpec& g = field.grid();
  field.index(it, ix);
  const AxisStencil st = axis_stencil(it, g.n_t, g.dt);
  const AxisStencil sx = axis_stencil(ix, g.n_x, g.dx);
  return Jets{difference(field.at(st.plus, ix), field.at(st.minus, ix), st.inv_step),
              difference(field.at(it, sx.plus), field.at(it, sx.minus), sx.inv_step)};
}

double discrete_action(const SpaceTimeField& field, const MetricOperator& op) {
  const GridSpec& g = field.grid();
  double action = 0.0;
  for (std::size_t it = 0; it < g.n_t; ++it) {
    for (std::size_t ix = 0; ix < g.n_x; ++ix) {
      const FrenetData fr = site_frenet(field, it, ix);
      const Jets j = jet_fields(field, it, ix);
      action += site_weight(g, it, ix) * (jet_energy(j.c_t, fr, op) + jet_energy(j.c_x, fr, op));
    }
  }
  return action;
}

LatticeGradient action_gradient(const SpaceTimeField& field, const MetricOperator& op) {
  const GridSpec& g = field.grid();
  LatticeGradient grad(g.sites(), Points(g.nodes, Point::Zero()));

  auto scatter = [&](std::size_t site_plus, std::size_t site_minus, const Points& d, double scale) {
    for (std::size_t k = 0; k < g.nodes; ++k) {
      grad[site_plus][k] += scale * d[k];
      grad[site_minus][k] -= scale * d[k];
    }
  };

  for (std::size_t it = 0; it < g.n_t; ++it) {
    for (std::size_t ix = 0; ix < g.n_x; ++ix) {
      const std::size_t site = field.index(it, ix);
      const double w = site_weight(g, it, ix);
      const FrenetData fr = site_frenet(field, it, ix);
      const Jets j = jet_fields(field, it, ix);
      const SiteGradient gt = site_gradient(field.at(it, ix), fr, j.c_t, op);
      const SiteGradient gx = site_gradient(field.at(it, ix), fr, j.c_x, op);
      for (std::size_t k = 0; k < g.nodes; ++k) grad[site][k] += w * (gt.d_curve[k] + gx.d_curve[k]);

      const AxisStencil st = axis_stencil(it, g.n_t, g.dt);
      scatter(field.index(st.plus, ix), field.index(st.minus, ix), gt.d_jet, w * st.inv_step);
      const AxisStencil sx = axis_stencil(ix, g.n_x, g.dx);
      scatter(field.index(it, sx.plus), field.index(it, sx.minus), gx.d_jet, w * sx.inv_step);
    }
  }
  for (std::size_t it = 0; it < g.n_t; ++it) {
    for (std::size_t ix = 0; ix < g.n_x; ++ix) {
      if (field.is_boundary(it, ix)) {
        std::fill(grad[field.index(it, ix)].begin(), grad[field.index(it, ix)].end(), Point::Zero());
      }
    }
  }
  return grad;
}

double max_norm(const LatticeGradient& g) {
  double m = 0.0;
  for (const auto& site : g) {
    for (const auto& p : site) m = std::max(m, p.cwiseAbs().maxCoeff());
  }
  return m;
}

CovariantResidual covariant_residual(const SpaceTimeField& field, const MetricOperator& op,
                                     const ForceSpec& force_v) {
  const GridSpec& g = field.grid();
  g.validate();
  const std::size_t n = g.nodes;

  struct SiteData {
    FrenetData fr;
    VelocityDecomposition t;
    VelocityDecomposition x;
    Field p_ht, p_hx, p_vt, p_vx;
  };
  std::vector<SiteData> data(g.sites());
  for (std::size_t it = 0; it < g.n_t; ++it) {
    for (std::size_t ix = 0; ix < g.n_x; ++ix) {
      SiteData& sd = data[field.index(it, ix)];
      sd.fr = site_frenet(field, it, ix);
      const Jets j = jet_fields(field, it, ix);
      sd.t = decompose(j.c_t, sd.fr);
      sd.x = decompose(j.c_x, sd.fr);
      sd.p_ht = apply_operator(op, sd.t.h, sd.fr);
      sd.p_hx = apply_operator(op, sd.x.h, sd.fr);
      sd.p_vt = apply_operator(op, sd.t.v, sd.fr);
      sd.p_vx = apply_operator(op, sd.x.v, sd.fr);
    }
  }

  CovariantResidual res;
  res.r_h.resize(g.sites());
  res.r_v.resize(g.sites());
  res.site_max_h.assign(g.sites(), 0.0);
  res.site_max_v.assign(g.sites(), 0.0);
  for (std::size_t it = 1; it + 1 < g.n_t; ++it) {
    for (std::size_t ix = 1; ix + 1 < g.n_x; ++ix) {
      const std::size_t site = field.index(it, ix);
      const SiteData& c = data[site];
      const AxisDivergence dt_st = divergence_stencil(it, g.n_t, g.dt);
      const AxisDivergence dx_st = divergence_stencil(ix, g.n_x, g.dx);
      auto along_t = [&](std::size_t k, auto member) {
        double acc = 0.0;
        for (int j = 0; j < 3; ++j) {
          if (dt_st.w[j] != 0.0) acc += dt_st.w[j] * (data[field.index(dt_st.at[j], ix)].*member)[k];
        }
        return acc;
      };
      auto along_x = [&](std::size_t k, auto member) {
        double acc = 0.0;
        for (int j = 0; j < 3; ++j) {
          if (dx_st.w[j] != 0.0) acc += dx_st.w[j] * (data[field.index(it, dx_st.at[j])].*member)[k];
        }
        return acc;
      };

      Field coupling(n);
      for (std::size_t k = 0; k < n; ++k) {
        coupling[k] = c.x.h[k] * c.p_vx[k] + c.t.h[k] * c.p_vt[k];
      }
      const Field transport = arclength_derivative(coupling, c.fr);

      SimState local{field.at(it, ix), c.p_ht, c.p_vt, static_cast<double>(it) * g.dt};
      const Field force = force_v.evaluate(local);

      Field rh(n), rv(n);
      for (std::size_t k = 0; k < n; ++k) {
        const double lhs_h = along_x(k, &SiteData::p_hx) + along_t(k, &SiteData::p_ht);
        const double energy = 0.5 * (c.x.h[k] * c.p_hx[k] + c.t.h[k] * c.p_ht[k]);
        rh[k] = lhs_h - (transport[k] - c.fr.curvature[k] * energy);
        const double lhs_v = along_x(k, &SiteData::p_vx) + along_t(k, &SiteData::p_vt);
        rv[k] = lhs_v - force[k];
        res.site_max_h[site] = std::max(res.site_max_h[site], std::abs(rh[k]));
        res.site_max_v[site] = std::max(res.site_max_v[site], std::abs(rv[k]));
      }
      res.max_h = std::max(res.max_h, res.site_max_h[site]);
      res.max_v = std::max(res.max_v, res.site_max_v[site]);
      res.r_h[site] = std::move(rh);
      res.r_v[site] = std::move(rv);
    }
  }
  return res;
}

RelaxResult relax(SpaceTimeField field, const MetricOperator& op, const RelaxOptions& options) {
  if (!(options.step_size > 0.0) || !std::isfinite(options.step_size)) {
    throw ValidationError("relaxation step size must be positive");
  }
  if (!(options.tol >= 0.0)) throw ValidationError("relaxation tolerance must be non-negative");
  if (options.method == RelaxMethod::lbfgs && options.lbfgs_memory == 0) {
    throw ValidationError("L-BFGS memory must be at least 1");
  }
  const GridSpec& g = field.grid();
  const auto dofs = static_cast<Eigen::Index>(2 * g.sites() * g.nodes);

  auto flatten_points = [&](const auto& site_points) {
    Eigen::VectorXd out(dofs);
    Eigen::Index k = 0;
    for (const auto& site : site_points) {
      for (std::size_t i = 0; i < g.nodes; ++i) {
        out[k++] = site[i].x();
        out[k++] = site[i].y();
      }
    }
    return out;
  };

  RelaxResult result{field, {}, false, false, 0};
  double step = options.step_size;
  double action = discrete_action(field, op);
  Eigen::VectorXd position = flatten_points(field.curves());
  std::optional<Eigen::VectorXd> prev_position;
  Eigen::VectorXd prev_gradient;
  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> history;  // (s, y), newest last
  std::size_t iter = 0;
  for (;; ++iter) {
    LatticeGradient grad;
    try {
      grad = action_gradient(field, op);
    } catch (const Error& e) {
      rethrow_with_context(e, "relaxation iterate " + std::to_string(iter));
    }
    const Eigen::VectorXd gradient = flatten_points(grad);

    Eigen::VectorXd direction = -gradient;
    if (prev_position) {
      const Eigen::VectorXd s = position - *prev_position;
      const Eigen::VectorXd y = gradient - prev_gradient;
      const double sy = s.dot(y);
      if (options.method == RelaxMethod::lbfgs) {
        if (sy > 0.0) {
          history.emplace_back(s, y);
          if (history.size() > options.lbfgs_memory) history.pop_front();
        }
        if (!history.empty()) {
          std::vector<double> alpha(history.size());
          Eigen::VectorXd q = gradient;
          for (std::size_t j = history.size(); j-- > 0;) {
            const auto& [sj, yj] = history[j];
            alpha[j] = sj.dot(q) / sj.dot(yj);
            q -= alpha[j] * yj;
          }
          const auto& [sl, yl] = history.back();
          q *= sl.dot(yl) / yl.squaredNorm();
          for (std::size_t j = 0; j < history.size(); ++j) {
            const auto& [sj, yj] = history[j];
            q += (alpha[j] - yj.dot(q) / sj.dot(yj)) * sj;
          }
          if (q.dot(gradient) > 0.0) {
            direction = -q;
            step = 1.0;
          } else {
            history.clear();
          }
        }
      } else if (options.barzilai_borwein && sy > 0.0 && std::isfinite(s.squaredNorm() / sy)) {
        step = s.squaredNorm() / sy;
      }
    }

    RelaxTraceRow row{iter, action, max_norm(grad), step, std::nullopt, std::nullopt};
    if (options.residual_every != 0 && iter % options.residual_every == 0) {
      const CovariantResidual r = covariant_residual(field, op, options.force_v);
      row.residual_h = r.max_h;
      row.residual_v = r.max_v;
    }
    result.trace.push_back(row);
    if (row.gradient_norm < options.tol) {
      result.converged = true;
      break;
    }
    if (iter >= options.max_iters) break;

    bool accepted = false;
    for (int halvings = 0; halvings <= 30; ++halvings) {
      std::vector<ClosedCurve> curves = field.curves();
      try {
        for (std::size_t it = 1; it + 1 < g.n_t; ++it) {
          for (std::size_t ix = 1; ix + 1 < g.n_x; ++ix) {
            const std::size_t site = field.index(it, ix);
            const auto base = static_cast<Eigen::Index>(2 * site * g.nodes);
            Points pts = curves[site].points();
            for (std::size_t k = 0; k < pts.size(); ++k) {
              const auto at = base + static_cast<Eigen::Index>(2 * k);
              pts[k] += step * Point(direction[at], direction[at + 1]);
            }
            curves[site] = ClosedCurve(std::move(pts));
          }
        }
        SpaceTimeField trial(g, std::move(curves));
        const double trial_action = discrete_action(trial, op);
        if (!std::isfinite(trial_action)) {
          throw BlowUpError("non-finite action");
        }
        if (trial_action <= action) {
          prev_position = std::move(position);
          prev_gradient = gradient;
          field = std::move(trial);
          position = flatten_points(field.curves());
          action = trial_action;
          accepted = true;
          break;
        }
      } catch (const Error& e) {
        rethrow_with_context(e, "relaxation iterate " + std::to_string(iter + 1));
      }
      if (halvings < 30) step *= 0.5;
    }
    if (!accepted) {
      result.stalled = true;
      break;
    }
  }
  result.iterations = iter;
  result.field = std::move(field);
  return result;
}

SpaceTimeField two_circle_field(const GridSpec& grid, double r0, double r1) {
  if (!(r0 > 0.0) || !(r1 > 0.0)) throw ValidationError("circle radii must be positive");
  return interpolate_boundary(grid, [&](std::size_t it, std::size_t) {
    const double s = static_cast<double>(it) / static_cast<double>(grid.n_t - 1);
    return make_circle(grid.nodes, r0 + (r1 - r0) * s);
  });
}

}  // namespace unred
