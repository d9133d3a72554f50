#pragma once

#include "unred/types.hpp"

#include <cstddef>
#include <functional>
#include <span>

namespace unred::spectral {

/// Multiplies the discrete Fourier coefficients of a real periodic sample
/// sequence by `multiplier(k)` for k = 0..N/2 and transforms back. The
/// multiplier must be even in k so the result stays real.
Field fourier_multiply(std::span<const double> f,
                       const std::function<double(std::size_t)>& multiplier);

/// Periodic spectral derivative d/dθ on the uniform grid θ_i = 2πi/N,
/// evaluated as an antisymmetric circulant sum in real space. Summation order
/// is fixed relative to each node, so a cyclic relabelling of the input
/// relabels the output bit for bit.
Points periodic_derivative(std::span<const Point> c);

/// Scalar version of `periodic_derivative`.
Field periodic_derivative(std::span<const double> f);

}  // namespace unred::spectral
