#pragma once

#include "unred/curve.hpp"

namespace unred {

/// Gaussian kernel exp(−|x − y|²/σ²) for the currents inner product.
struct CurrentsKernel {
  double sigma = 0.5;
};

/// ⟨C1, C2⟩ = Σ_i Σ_j k(x_i, y_j) (e_i · f_j) over edge vectors e, f and
/// edge midpoints x, y. The terms are summed in a canonical order (by
/// magnitude, then value), so the result does not depend on how either
/// curve's nodes are labelled and ⟨C1, C2⟩ = ⟨C2, C1⟩ exactly.
double currents_inner(const ClosedCurve& c1, const ClosedCurve& c2, const CurrentsKernel& k);

/// sqrt(max(0, (⟨C1,C1⟩ + ⟨C2,C2⟩) − 2⟨C1,C2⟩)).
double currents_distance(const ClosedCurve& c1, const ClosedCurve& c2, const CurrentsKernel& k);

/// sqrt(⟨C,C⟩).
double currents_norm(const ClosedCurve& c, const CurrentsKernel& k);

}  // namespace unred
