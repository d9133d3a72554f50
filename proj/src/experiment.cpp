#include "unred/experiment.hpp"

#include "unred/currents.hpp"
#include "unred/curve_io.hpp"
#include "unred/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace unred {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string sobolev_mode_name(SobolevMode m) {
  return m == SobolevMode::spectral ? "spectral" : "stencil";
}

SobolevMode parse_sobolev_mode(const std::string& s) {
  if (s == "spectral") return SobolevMode::spectral;
  if (s == "stencil") return SobolevMode::stencil;
  throw ValidationError("unknown sobolev_mode '" + s + "' (expected spectral or stencil)");
}

double positive(double x, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw ValidationError(std::string(name) + " must be positive");
  }
  return x;
}

std::size_t ratio_count(double big, double small, const std::string& what) {
  const double r = big / small;
  const double k = std::round(r);
  if (k < 1.0 || std::abs(r - k) > 1e-9 * r) {
    throw ValidationError(what + " (" + format_double(big) + " / " + format_double(small) +
                          ") is not a whole number");
  }
  return static_cast<std::size_t>(k);
}

std::string dt_label(double dt) {
  std::ostringstream os;
  os << dt;
  return os.str();
}

nlohmann::ordered_json snapshot_meta(const SimState& s, std::size_t step, double dt,
                                     const MetricOperator& op, const ForceSpec& force) {
  return {{"step", step},          {"time", s.time},
          {"dt", dt},              {"operator", op.name()},
          {"A", op.parameter()},   {"force", force.describe()}};
}

// Smooth periodic perturbation built from a few low Fourier modes.
Points smooth_noise(std::size_t n, double amplitude, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  const Field theta = parameter_nodes(n);
  Points out(n, Point::Zero());
  for (int mode = 1; mode <= 3; ++mode) {
    const Point a(coeff(rng), coeff(rng));
    const Point b(coeff(rng), coeff(rng));
    for (std::size_t k = 0; k < n; ++k) {
      out[k] += amplitude / mode * (a * std::cos(mode * theta[k]) + b * std::sin(mode * theta[k]));
    }
  }
  return out;
}

SpaceTimeField boundary_from_directory(const ExperimentConfig& c, const GridSpec& base) {
  const fs::path dir(c.relax_boundary);
  std::vector<std::string> missing;
  for (std::size_t it = 0; it < base.n_t; ++it) {
    for (std::size_t ix = 0; ix < base.n_x; ++ix) {
      const bool boundary = it == 0 || ix == 0 || it + 1 == base.n_t || ix + 1 == base.n_x;
      if (!boundary) continue;
      const fs::path p = dir / ("site_" + std::to_string(it) + "_" + std::to_string(ix) + ".csv");
      if (!fs::exists(p)) missing.push_back("(" + std::to_string(it) + ", " + std::to_string(ix) + ")");
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw ValidationError("missing boundary curve files in '" + dir.string() + "' for sites " + list);
  }
  GridSpec grid = base;
  grid.nodes = read_curve_file(dir / "site_0_0.csv").size();
  return interpolate_boundary(grid, [&](std::size_t it, std::size_t ix) {
    const fs::path p = dir / ("site_" + std::to_string(it) + "_" + std::to_string(ix) + ".csv");
    ClosedCurve curve = read_curve_file(p);
    if (curve.size() != grid.nodes) {
      throw ValidationError("boundary file '" + p.string() + "' has " + std::to_string(curve.size()) +
                            " nodes but site_0_0.csv has " + std::to_string(grid.nodes));
    }
    return curve;
  });
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n_points < ClosedCurve::min_nodes) throw ValidationError("n_points must be at least 8");
  make_operator();
  if (dt_list.empty()) throw ValidationError("dt_list must not be empty");
  for (std::size_t i = 0; i < dt_list.size(); ++i) {
    positive(dt_list[i], "dt_list entries");
    if (i > 0 && !(dt_list[i] < dt_list[i - 1])) {
      throw ValidationError("dt_list must be strictly decreasing");
    }
  }
  positive(dt, "dt");
  positive(t_final, "t_final");
  positive(bump_width, "bump_width");
  positive(sigma, "sigma");
  if (!std::isfinite(bump_amplitude) || !std::isfinite(v_const)) {
    throw ValidationError("bump_amplitude and v_const must be finite");
  }
  positive(relax_dt, "relax_dt");
  positive(relax_dx, "relax_dx");
  positive(relax_step, "relax_step");
  positive(relax_r0, "relax_r0");
  positive(relax_r1, "relax_r1");
  if (!(relax_tol >= 0.0)) throw ValidationError("relax_tol must be non-negative");
  if (!(relax_perturbation >= 0.0)) throw ValidationError("relax_perturbation must be non-negative");
  if (relax_method != "gradient" && relax_method != "lbfgs") {
    throw ValidationError("relax_method must be gradient or lbfgs, got '" + relax_method + "'");
  }
  if (output_dir.empty()) throw ValidationError("output_dir must not be empty");
}

MetricOperator ExperimentConfig::make_operator() const {
  return parse_operator(op, metric_a, sobolev_mode);
}

InitialVelocity ExperimentConfig::initial_velocity() const {
  return InitialVelocity{bump_amplitude, bump_width, v_const};
}

ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig c) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  static const std::set<std::string> known = {
      "n_points",       "operator",        "metric_a",          "sobolev_mode",
      "freeze_length",  "dt_list",         "dt",                "t_final",
      "bump_amplitude", "bump_width",      "v_const",           "sigma",
      "snapshot_every", "output_dir",      "seed",              "relax_n_t",
      "relax_n_x",      "relax_nodes",     "relax_dt",          "relax_dx",
      "relax_boundary", "relax_r0",        "relax_r1",          "relax_perturbation",
      "relax_step",     "relax_max_iters", "relax_tol",         "relax_residual_every",
      "relax_sobolev_mode", "relax_method"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw ValidationError("unknown config key '" + key + "'");
  }
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("n_points", c.n_points);
    get("operator", c.op);
    get("metric_a", c.metric_a);
    if (j.contains("sobolev_mode")) c.sobolev_mode = parse_sobolev_mode(j.at("sobolev_mode").get<std::string>());
    get("freeze_length", c.freeze_length);
    get("dt_list", c.dt_list);
    get("dt", c.dt);
    get("t_final", c.t_final);
    get("bump_amplitude", c.bump_amplitude);
    get("bump_width", c.bump_width);
    get("v_const", c.v_const);
    get("sigma", c.sigma);
    get("snapshot_every", c.snapshot_every);
    get("output_dir", c.output_dir);
    get("seed", c.seed);
    get("relax_n_t", c.relax_n_t);
    get("relax_n_x", c.relax_n_x);
    get("relax_nodes", c.relax_nodes);
    get("relax_dt", c.relax_dt);
    get("relax_dx", c.relax_dx);
    get("relax_boundary", c.relax_boundary);
    get("relax_r0", c.relax_r0);
    get("relax_r1", c.relax_r1);
    get("relax_perturbation", c.relax_perturbation);
    get("relax_step", c.relax_step);
    get("relax_max_iters", c.relax_max_iters);
    get("relax_tol", c.relax_tol);
    get("relax_residual_every", c.relax_residual_every);
    get("relax_method", c.relax_method);
    if (j.contains("relax_sobolev_mode")) {
      c.relax_sobolev_mode = parse_sobolev_mode(j.at("relax_sobolev_mode").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  return {{"n_points", c.n_points},
          {"operator", c.op},
          {"metric_a", c.metric_a},
          {"sobolev_mode", sobolev_mode_name(c.sobolev_mode)},
          {"freeze_length", c.freeze_length},
          {"dt_list", c.dt_list},
          {"dt", c.dt},
          {"t_final", c.t_final},
          {"bump_amplitude", c.bump_amplitude},
          {"bump_width", c.bump_width},
          {"v_const", c.v_const},
          {"sigma", c.sigma},
          {"snapshot_every", c.snapshot_every},
          {"output_dir", c.output_dir},
          {"seed", c.seed},
          {"relax_n_t", c.relax_n_t},
          {"relax_n_x", c.relax_n_x},
          {"relax_nodes", c.relax_nodes},
          {"relax_dt", c.relax_dt},
          {"relax_dx", c.relax_dx},
          {"relax_boundary", c.relax_boundary},
          {"relax_r0", c.relax_r0},
          {"relax_r1", c.relax_r1},
          {"relax_perturbation", c.relax_perturbation},
          {"relax_step", c.relax_step},
          {"relax_max_iters", c.relax_max_iters},
          {"relax_tol", c.relax_tol},
          {"relax_residual_every", c.relax_residual_every},
          {"relax_sobolev_mode", sobolev_mode_name(c.relax_sobolev_mode)},
          {"relax_method", c.relax_method}};
}

std::size_t step_count(double t_final, double dt) {
  return ratio_count(t_final, dt, "t_final / dt");
}

SimulateSummary cmd_simulate(const ExperimentConfig& config, const std::string& initial_curve) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const ClosedCurve curve =
      initial_curve == "circle" ? make_circle(config.n_points) : read_curve_file(initial_curve);
  MetricOperator op = config.make_operator();
  if (config.freeze_length) op = op.frozen_at(compute_frenet(curve).length);
  const ForceSpec force = ForceSpec::zero();
  const SimState initial = make_initial_state(curve, op, config.initial_velocity());
  const std::size_t steps = step_count(config.t_final, config.dt);

  const fs::path out_dir(config.output_dir);
  ensure_dir(out_dir);
  double max_m_h = 0.0;
  Observer obs;
  obs.every = config.snapshot_every;
  obs.on_snapshot = [&](std::size_t step, const SimState& s) {
    for (double m : s.m_h) max_m_h = std::max(max_m_h, std::abs(m));
    char name[32];
    std::snprintf(name, sizeof(name), "snapshot_%06zu", step);
    write_curve_file(out_dir / (std::string(name) + ".csv"), s.curve);
    write_text(out_dir / (std::string(name) + ".json"),
               snapshot_meta(s, step, config.dt, op, force).dump(2) + "\n");
  };
  const Trajectory traj = simulate(initial, config.dt, steps, op, force, obs);

  SimulateSummary summary{
      traj.final_state().time, steps, max_m_h,
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), initial,
      traj.final_state()};

  nlohmann::ordered_json j = {{"final_time", summary.final_time},
                              {"steps", summary.steps},
                              {"dt", config.dt},
                              {"max_abs_m_h", summary.max_abs_m_h},
                              {"wall_seconds", summary.wall_seconds},
                              {"operator", op.name()},
                              {"A", op.parameter()},
                              {"force", force.describe()},
                              {"config", to_json(config)}};
  write_text(out_dir / "summary.json", j.dump(2) + "\n");
  return summary;
}

DecoupleResult cmd_decouple(const ExperimentConfig& config, bool write_files) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const double coarse = config.dt_list.front();
  const std::size_t coarse_steps = step_count(config.t_final, coarse);
  const ClosedCurve circle = make_circle(config.n_points);
  MetricOperator op = config.make_operator();
  if (config.freeze_length) op = op.frozen_at(compute_frenet(circle).length);
  const ForceSpec force = ForceSpec::zero();
  const CurrentsKernel kernel{config.sigma};

  InitialVelocity fixed_vel = config.initial_velocity();
  fixed_vel.v_const = 0.0;
  const SimState fixed0 = make_initial_state(circle, op, fixed_vel);
  const SimState reparam0 = make_initial_state(circle, op, config.initial_velocity());

  struct Run {
    Trajectory fixed;
    Trajectory reparam;
  };
  std::vector<std::size_t> every(config.dt_list.size());
  std::vector<std::size_t> steps(config.dt_list.size());
  for (std::size_t i = 0; i < config.dt_list.size(); ++i) {
    every[i] = ratio_count(coarse, config.dt_list[i], "coarsest dt / dt");
    steps[i] = coarse_steps * every[i];
  }

  std::vector<std::future<Trajectory>> fixed_runs;
  std::vector<std::future<Trajectory>> reparam_runs;
  for (std::size_t i = 0; i < config.dt_list.size(); ++i) {
    const double dt = config.dt_list[i];
    const Observer obs{every[i], {}};
    fixed_runs.push_back(std::async(std::launch::async, [&, dt, i, obs] {
      return simulate(fixed0, dt, steps[i], op, force, obs);
    }));
    reparam_runs.push_back(std::async(std::launch::async, [&, dt, i, obs] {
      return simulate(reparam0, dt, steps[i], op, force, obs);
    }));
  }

  DecoupleResult result;
  std::vector<Run> runs;
  std::optional<Error> failure;
  std::string failure_context;
  for (std::size_t i = 0; i < config.dt_list.size(); ++i) {
    try {
      Run r{fixed_runs[i].get(), reparam_runs[i].get()};
      if (!failure) runs.push_back(std::move(r));
    } catch (const Error& e) {
      if (!failure) {
        failure = e;
        failure_context = "dt " + format_double(config.dt_list[i]);
      }
    }
  }

  for (std::size_t i = 0; i < runs.size(); ++i) {
    const Run& r = runs[i];
    for (std::size_t s = 0; s < r.fixed.snapshots.size(); ++s) {
      result.rows.push_back({config.dt_list[i], r.fixed.snapshots[s].time,
                             currents_distance(r.fixed.snapshots[s].curve,
                                               r.reparam.snapshots[s].curve, kernel)});
    }
    result.final_distances.push_back(result.rows.back().distance);
  }

  const fs::path out_dir(config.output_dir);
  if (write_files) {
    ensure_dir(out_dir);
    std::ostringstream csv;
    csv << "dt,time,currents_distance\n";
    for (const auto& row : result.rows) {
      csv << format_double(row.dt) << ',' << format_double(row.time) << ','
          << format_double(row.distance) << '\n';
    }
    write_text(out_dir / "decouple.csv", csv.str());
  }
  if (failure) rethrow_with_context(*failure, failure_context);

  if (config.dt_list.size() == 1) {
    result.warnings.push_back("single dt in dt_list: decoupling trend cannot be assessed");
  }
  result.pass = true;
  for (std::size_t i = 1; i < result.final_distances.size(); ++i) {
    if (!(result.final_distances[i] < result.final_distances[i - 1])) result.pass = false;
  }

  if (write_files) {
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const fs::path dir = out_dir / "curves" / ("dt_" + dt_label(config.dt_list[i]));
      ensure_dir(dir);
      write_curve_file(dir / "initial.csv", circle);
      write_curve_file(dir / "fixed.csv", runs[i].fixed.final_state().curve);
      write_curve_file(dir / "reparam.csv", runs[i].reparam.final_state().curve);
    }
    nlohmann::ordered_json j = {
        {"verdict", result.pass ? "pass" : "fail"},
        {"dt_list", config.dt_list},
        {"final_distances", result.final_distances},
        {"t_final", config.t_final},
        {"warnings", result.warnings},
        {"wall_seconds",
         std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()},
        {"config", to_json(config)}};
    write_text(out_dir / "verdict.json", j.dump(2) + "\n");
  }
  return result;
}

RelaxRun cmd_relax(const ExperimentConfig& config, bool write_files) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  GridSpec grid{config.relax_n_t, config.relax_n_x, config.relax_dt, config.relax_dx,
                config.relax_nodes};
  grid.validate();

  std::optional<SpaceTimeField> initial;
  if (config.relax_boundary == "two_circle") {
    initial = two_circle_field(grid, config.relax_r0, config.relax_r1);
  } else if (config.relax_boundary == "constant") {
    const ClosedCurve circle = make_circle(grid.nodes, config.relax_r0);
    SpaceTimeField f = constant_field(grid, circle);
    std::mt19937_64 rng(config.seed);
    for (std::size_t it = 1; it + 1 < grid.n_t; ++it) {
      for (std::size_t ix = 1; ix + 1 < grid.n_x; ++ix) {
        const Points noise = smooth_noise(grid.nodes, config.relax_perturbation, rng);
        Points pts = circle.points();
        for (std::size_t k = 0; k < pts.size(); ++k) pts[k] += noise[k];
        f.set(it, ix, ClosedCurve(std::move(pts)));
      }
    }
    initial = std::move(f);
  } else {
    initial = boundary_from_directory(config, grid);
  }

  const MetricOperator op = parse_operator(config.op, config.metric_a, config.relax_sobolev_mode);
  RelaxOptions options;
  options.step_size = config.relax_step;
  options.max_iters = config.relax_max_iters;
  options.tol = config.relax_tol;
  options.residual_every = config.relax_residual_every;
  options.method = config.relax_method == "lbfgs" ? RelaxMethod::lbfgs : RelaxMethod::gradient;

  RelaxRun run{relax(*initial, op, options), {}};
  run.final_residual = covariant_residual(run.result.field, op);

  if (write_files) {
    const fs::path out_dir(config.output_dir);
    ensure_dir(out_dir);
    std::ostringstream csv;
    csv << "iteration,action,gradient_norm,step_size,residual_h,residual_v\n";
    for (const auto& row : run.result.trace) {
      csv << row.iteration << ',' << format_double(row.action) << ','
          << format_double(row.gradient_norm) << ',' << format_double(row.step_size) << ','
          << (row.residual_h ? format_double(*row.residual_h) : "") << ','
          << (row.residual_v ? format_double(*row.residual_v) : "") << '\n';
    }
    write_text(out_dir / "relax_trace.csv", csv.str());
    const double final_action = run.result.trace.back().action;
    write_checkpoint(out_dir / "relax_final.ckpt",
                     Checkpoint{run.result.field, op.name(), op.parameter(), run.result.iterations,
                                final_action});
    nlohmann::ordered_json j = {
        {"iterations", run.result.iterations},
        {"converged", run.result.converged},
        {"stalled", run.result.stalled},
        {"final_action", final_action},
        {"final_gradient_norm", run.result.trace.back().gradient_norm},
        {"residual_h", run.final_residual.max_h},
        {"residual_v", run.final_residual.max_v},
        {"wall_seconds",
         std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()},
        {"config", to_json(config)}};
    write_text(out_dir / "relax_summary.json", j.dump(2) + "\n");
  }
  return run;
}

}  // namespace unred
