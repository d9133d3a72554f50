#pragma once

#include "unred/curve.hpp"

#include <optional>
#include <span>
#include <string>
#include <variant>

namespace unred {

/// P = 1 (plain L² metric).
struct L2Metric {};

/// P = 1 + A κ², a pointwise multiplication operator.
struct CurvatureWeightedMetric {
  double weight = 1.0;
};

/// How the Sobolev operator 1 − A² D_θ² is discretised.
enum class SobolevMode {
  /// Fourier multiplier 1 + A²(2πk/L)², i.e. D_θ taken at the mean speed L/2π.
  spectral,
  /// Variable-coefficient three-point stencil using the actual node speeds;
  /// inverted by a sparse symmetric solve.
  stencil,
};

struct SobolevMetric {
  double length_scale = 0.3;
  SobolevMode mode = SobolevMode::spectral;
  /// When set, the spectral multiplier uses this length instead of the
  /// curve's current length (the frozen-operator ablation).
  std::optional<double> reference_length;
};

/// Reparametrisation-invariant metric operator P with g_P(u, w) = ∫ u P w ds.
class MetricOperator {
 public:
  using Variant = std::variant<L2Metric, CurvatureWeightedMetric, SobolevMetric>;

  MetricOperator() = default;
  explicit MetricOperator(Variant v);

  static MetricOperator l2() { return MetricOperator(L2Metric{}); }
  static MetricOperator curvature_weighted(double weight) {
    return MetricOperator(CurvatureWeightedMetric{weight});
  }
  static MetricOperator sobolev(double length_scale, SobolevMode mode = SobolevMode::spectral) {
    return MetricOperator(SobolevMetric{length_scale, mode, std::nullopt});
  }

  const Variant& variant() const noexcept { return v_; }

  /// "l2", "curvature_weighted" or "sobolev".
  std::string name() const;
  /// A for the weighted and Sobolev variants, 0 for L².
  double parameter() const noexcept;

  /// Same operator with the Sobolev multiplier pinned to `length`. No-op for
  /// the other variants.
  MetricOperator frozen_at(double length) const;

 private:
  Variant v_ = L2Metric{};
};

Field apply_operator(const MetricOperator& op, std::span<const double> f, const FrenetData& frenet);

Field invert_operator(const MetricOperator& op, std::span<const double> m, const FrenetData& frenet);

double inner_product(const MetricOperator& op, std::span<const double> f, std::span<const double> g,
                     const FrenetData& frenet);

MetricOperator parse_operator(const std::string& name, double parameter,
                              SobolevMode mode = SobolevMode::spectral);

}  // namespace unred
