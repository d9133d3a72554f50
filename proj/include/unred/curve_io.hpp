#pragma once

#include "unred/covariant.hpp"
#include "unred/curve.hpp"
#include "unred/metric.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace unred {

/// Curve files hold one "x,y" pair per line, closure implicit. Blank lines
/// are ignored; anything else that is not two finite numbers is an error
/// naming the line.
ClosedCurve parse_curve(std::istream& in, const std::string& source = "<stream>");
ClosedCurve read_curve_file(const std::filesystem::path& path);

/// Writes with 17 significant digits so values round-trip exactly.
void write_curve(std::ostream& out, const ClosedCurve& curve);
void write_curve_file(const std::filesystem::path& path, const ClosedCurve& curve);

/// Formats a double with 17 significant digits.
std::string format_double(double x);

/// Field checkpoint: a single-line JSON header (grid, operator, iteration,
/// action) followed by n_t·n_x·N lines "x,y", t outer, x inner, θ innermost.
struct Checkpoint {
  SpaceTimeField field;
  std::string operator_name;
  double operator_parameter = 0.0;
  std::size_t iteration = 0;
  double action = 0.0;
};

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace unred
