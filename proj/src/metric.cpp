#include "unred/metric.hpp"

#include "unred/error.hpp"
#include "unred/spectral.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <numbers>

namespace unred {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_field(std::span<const double> f, const FrenetData& frenet) {
  if (f.size() != frenet.size()) {
    throw ValidationError("metric operator: field has " + std::to_string(f.size()) +
                          " nodes, curve has " + std::to_string(frenet.size()));
  }
}

double sobolev_length(const SobolevMetric& s, const FrenetData& frenet) {
  return s.reference_length.value_or(frenet.length);
}

void check_even(std::size_t n) {
  if (n % 2 != 0) {
    throw ValidationError("Sobolev operator needs an even node count, got " + std::to_string(n));
  }
}

double spectral_symbol(double a, double length, std::size_t k) {
  const double wave = 2.0 * std::numbers::pi * static_cast<double>(k) / length;
  return 1.0 + a * a * wave * wave;
}

// (W + A² K) f where W = diag(s_i Δθ) and K is the stiffness of
// A² ∫ (D_θ f)² ds with edge speeds (s_i + s_{i+1})/2.
Field stencil_weighted_apply(double a, std::span<const double> f, const FrenetData& fr) {
  const std::size_t n = f.size();
  const double h = fr.spacing();
  Field out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ip = (i + 1) % n;
    const std::size_t im = (i + n - 1) % n;
    const double s_plus = 0.5 * (fr.speed[i] + fr.speed[ip]);
    const double s_minus = 0.5 * (fr.speed[i] + fr.speed[im]);
    const double flux = (f[ip] - f[i]) / s_plus - (f[i] - f[im]) / s_minus;
    out[i] = fr.speed[i] * h * f[i] - a * a * flux / h;
  }
  return out;
}

Field stencil_solve(double a, std::span<const double> m, const FrenetData& fr) {
  const auto n = static_cast<Eigen::Index>(m.size());
  const double h = fr.spacing();
  Eigen::SparseMatrix<double> mat(n, n);
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index ip = (i + 1) % n;
    const Eigen::Index im = (i + n - 1) % n;
    const double cp = a * a / (0.5 * (fr.speed[i] + fr.speed[ip]) * h);
    const double cm = a * a / (0.5 * (fr.speed[i] + fr.speed[im]) * h);
    trips.emplace_back(i, i, fr.speed[i] * h + cp + cm);
    trips.emplace_back(i, ip, -cp);
    trips.emplace_back(i, im, -cm);
    rhs[i] = fr.speed[i] * h * m[i];
  }
  mat.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(mat);
  if (solver.info() != Eigen::Success) {
    throw BlowUpError("Sobolev stencil operator factorisation failed");
  }
  const Eigen::VectorXd sol = solver.solve(rhs);
  return Field(sol.data(), sol.data() + n);
}

}  // namespace

MetricOperator::MetricOperator(Variant v) : v_(std::move(v)) {
  std::visit(overloaded{
                 [](const L2Metric&) {},
                 [](const CurvatureWeightedMetric& c) {
                   if (!(c.weight > 0.0)) {
                     throw ValidationError("curvature weight A must be positive");
                   }
                 },
                 [](const SobolevMetric& s) {
                   if (!(s.length_scale > 0.0)) {
                     throw ValidationError("Sobolev length scale A must be positive");
                   }
                   if (s.reference_length && !(*s.reference_length > 0.0)) {
                     throw ValidationError("Sobolev reference length must be positive");
                   }
                 },
             },
             v_);
}

std::string MetricOperator::name() const {
  return std::visit(overloaded{
                        [](const L2Metric&) { return std::string("l2"); },
                        [](const CurvatureWeightedMetric&) {
                          return std::string("curvature_weighted");
                        },
                        [](const SobolevMetric&) { return std::string("sobolev"); },
                    },
                    v_);
}

double MetricOperator::parameter() const noexcept {
  if (const auto* c = std::get_if<CurvatureWeightedMetric>(&v_)) return c->weight;
  if (const auto* s = std::get_if<SobolevMetric>(&v_)) return s->length_scale;
  return 0.0;
}

MetricOperator MetricOperator::frozen_at(double length) const {
  if (const auto* s = std::get_if<SobolevMetric>(&v_)) {
    SobolevMetric frozen = *s;
    frozen.reference_length = length;
    return MetricOperator(frozen);
  }
  return *this;
}

Field apply_operator(const MetricOperator& op, std::span<const double> f, const FrenetData& frenet) {
  check_field(f, frenet);
  return std::visit(
      overloaded{
          [&](const L2Metric&) { return Field(f.begin(), f.end()); },
          [&](const CurvatureWeightedMetric& c) {
            Field out(f.size());
            for (std::size_t i = 0; i < f.size(); ++i) {
              const double k = frenet.curvature[i];
              out[i] = (1.0 + c.weight * k * k) * f[i];
            }
            return out;
          },
          [&](const SobolevMetric& s) {
            check_even(f.size());
            if (s.mode == SobolevMode::stencil) {
              Field out = stencil_weighted_apply(s.length_scale, f, frenet);
              const double h = frenet.spacing();
              for (std::size_t i = 0; i < out.size(); ++i) out[i] /= frenet.speed[i] * h;
              return out;
            }
            const double length = sobolev_length(s, frenet);
            return spectral::fourier_multiply(f, [&](std::size_t k) {
              return spectral_symbol(s.length_scale, length, k);
            });
          },
      },
      op.variant());
}

Field invert_operator(const MetricOperator& op, std::span<const double> m, const FrenetData& frenet) {
  check_field(m, frenet);
  return std::visit(
      overloaded{
          [&](const L2Metric&) { return Field(m.begin(), m.end()); },
          [&](const CurvatureWeightedMetric& c) {
            Field out(m.size());
            for (std::size_t i = 0; i < m.size(); ++i) {
              const double k = frenet.curvature[i];
              out[i] = m[i] / (1.0 + c.weight * k * k);
            }
            return out;
          },
          [&](const SobolevMetric& s) {
            check_even(m.size());
            if (s.mode == SobolevMode::stencil) return stencil_solve(s.length_scale, m, frenet);
            const double length = sobolev_length(s, frenet);
            return spectral::fourier_multiply(m, [&](std::size_t k) {
              return 1.0 / spectral_symbol(s.length_scale, length, k);
            });
          },
      },
      op.variant());
}

double inner_product(const MetricOperator& op, std::span<const double> f, std::span<const double> g,
                     const FrenetData& frenet) {
  check_field(f, frenet);
  Field pg = apply_operator(op, g, frenet);
  for (std::size_t i = 0; i < pg.size(); ++i) pg[i] *= f[i];
  return curve_integral(pg, frenet);
}

MetricOperator parse_operator(const std::string& name, double parameter, SobolevMode mode) {
  if (name == "l2") return MetricOperator::l2();
  if (name == "curvature_weighted" || name == "curvature") {
    return MetricOperator::curvature_weighted(parameter);
  }
  if (name == "sobolev") return MetricOperator::sobolev(parameter, mode);
  throw ValidationError("unknown operator '" + name +
                        "' (expected l2, curvature_weighted or sobolev)");
}

}  // namespace unred
