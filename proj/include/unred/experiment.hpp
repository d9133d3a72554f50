#pragma once

#include "unred/covariant.hpp"
#include "unred/ivp.hpp"
#include "unred/metric.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace unred {

/// Settings shared by the CLI subcommands. Every field can come from a JSON
/// config file (same key) and be overridden by a kebab-case flag.
struct ExperimentConfig {
  std::size_t n_points = 100;
  std::string op = "sobolev";
  double metric_a = 0.3;
  SobolevMode sobolev_mode = SobolevMode::spectral;
  bool freeze_length = false;

  std::vector<double> dt_list = {0.04, 0.02, 0.01, 0.001};
  double dt = 0.01;
  double t_final = 1.0;
  double bump_amplitude = 0.5;
  double bump_width = 0.4;
  double v_const = 0.5;
  double sigma = 0.5;
  std::size_t snapshot_every = 10;

  std::string output_dir = "out";
  std::uint64_t seed = 1;

  std::size_t relax_n_t = 5;
  std::size_t relax_n_x = 5;
  std::size_t relax_nodes = 64;
  double relax_dt = 0.25;
  double relax_dx = 0.25;
  /// "two_circle", "constant", or a directory of site_<it>_<ix>.csv files.
  std::string relax_boundary = "two_circle";
  double relax_r0 = 1.0;
  double relax_r1 = 1.2;
  double relax_perturbation = 0.02;
  double relax_step = 0.5;
  std::size_t relax_max_iters = 50000;
  double relax_tol = 1e-9;
  std::size_t relax_residual_every = 100;
  /// Sobolev discretisation used by relax. The spectral form is not positive
  /// definite once node speeds vary strongly, which descent can exploit on
  /// fine lattices; the stencil form always is.
  SobolevMode relax_sobolev_mode = SobolevMode::stencil;
  /// "gradient" (steepest descent) or "lbfgs".
  std::string relax_method = "gradient";

  void validate() const;
  MetricOperator make_operator() const;
  InitialVelocity initial_velocity() const;
};

/// Overlays the keys present in `j` onto `base`; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});
nlohmann::ordered_json to_json(const ExperimentConfig& config);

/// Number of steps of size dt covering t_final; t_final must be a whole
/// multiple of dt (to 1e-9 relative).
std::size_t step_count(double t_final, double dt);

struct SimulateSummary {
  double final_time = 0.0;
  std::size_t steps = 0;
  double max_abs_m_h = 0.0;
  double wall_seconds = 0.0;
  SimState initial;
  SimState final_state;
};

/// Runs one trajectory from `initial_curve` ("circle" for the builtin unit
/// circle, otherwise a curve file) and writes snapshot_<step>.csv/.json plus
/// summary.json to the output directory.
SimulateSummary cmd_simulate(const ExperimentConfig& config, const std::string& initial_curve);

struct DistanceRow {
  double dt = 0.0;
  double time = 0.0;
  double distance = 0.0;
};

struct DecoupleResult {
  std::vector<DistanceRow> rows;
  std::vector<double> final_distances;  // one per dt_list entry
  bool pass = false;
  std::vector<std::string> warnings;
};

/// Twin runs per time step (with and without the constant vertical
/// velocity), currents distance between them at the coarsest step's times.
/// Writes decouple.csv (dt,time,currents_distance), verdict.json and the
/// initial/fixed/reparametrised final curves under curves/dt_<dt>/.
DecoupleResult cmd_decouple(const ExperimentConfig& config, bool write_files = true);

struct RelaxRun {
  RelaxResult result;
  CovariantResidual final_residual;
};

/// Builds the boundary from config.relax_boundary, relaxes, and writes
/// relax_trace.csv, relax_final.ckpt and relax_summary.json.
RelaxRun cmd_relax(const ExperimentConfig& config, bool write_files = true);

}  // namespace unred
