// Command-line front end: simulate, decouple and relax.

#include "unred/curve_io.hpp"
#include "unred/error.hpp"
#include "unred/experiment.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <vector>

namespace {

using unred::ExperimentConfig;

// Flags are parsed into a scratch config; only the ones actually given
// override the defaults and the JSON config file.
struct Overrides {
  ExperimentConfig scratch;
  std::string sobolev_mode = "spectral";
  std::string relax_sobolev_mode = "stencil";
  std::vector<std::pair<CLI::Option*, std::function<void(ExperimentConfig&)>>> entries;

  template <typename T>
  CLI::Option* add(CLI::App& app, const std::string& flag, T ExperimentConfig::*member,
                   const std::string& help) {
    CLI::Option* opt = app.add_option(flag, scratch.*member, help);
    entries.emplace_back(opt, [this, member](ExperimentConfig& c) { c.*member = scratch.*member; });
    return opt;
  }

  void apply(ExperimentConfig& c) const {
    for (const auto& [opt, fn] : entries) {
      if (opt->count() > 0) fn(c);
    }
  }
};

void register_flags(CLI::App& app, Overrides& o) {
  o.add(app, "--n-points", &ExperimentConfig::n_points, "curve nodes");
  o.add(app, "--operator", &ExperimentConfig::op, "l2 | curvature_weighted | sobolev");
  o.add(app, "--metric-a", &ExperimentConfig::metric_a, "operator constant A");
  auto* mode = app.add_option("--sobolev-mode", o.sobolev_mode, "spectral | stencil");
  o.entries.emplace_back(mode, [&o](ExperimentConfig& c) {
    c = unred::config_from_json({{"sobolev_mode", o.sobolev_mode}}, c);
  });
  o.add(app, "--freeze-length", &ExperimentConfig::freeze_length, "pin the Sobolev length at t = 0");
  o.add(app, "--dt-list", &ExperimentConfig::dt_list, "time steps for decouple, strictly decreasing")
      ->delimiter(',');
  o.add(app, "--dt", &ExperimentConfig::dt, "time step for simulate");
  o.add(app, "--t-final", &ExperimentConfig::t_final, "final time");
  o.add(app, "--bump-amplitude", &ExperimentConfig::bump_amplitude, "initial shape velocity amplitude");
  o.add(app, "--bump-width", &ExperimentConfig::bump_width, "initial shape velocity width");
  o.add(app, "--v-const", &ExperimentConfig::v_const, "constant vertical velocity");
  o.add(app, "--sigma", &ExperimentConfig::sigma, "currents kernel width");
  o.add(app, "--snapshot-every", &ExperimentConfig::snapshot_every, "simulate snapshot interval (steps)");
  o.add(app, "--output-dir", &ExperimentConfig::output_dir, "output directory");
  o.add(app, "--seed", &ExperimentConfig::seed, "seed for randomised initial data");
  o.add(app, "--relax-n-t", &ExperimentConfig::relax_n_t, "lattice sites in t");
  o.add(app, "--relax-n-x", &ExperimentConfig::relax_n_x, "lattice sites in x");
  o.add(app, "--relax-nodes", &ExperimentConfig::relax_nodes, "curve nodes per site");
  o.add(app, "--relax-dt", &ExperimentConfig::relax_dt, "lattice spacing in t");
  o.add(app, "--relax-dx", &ExperimentConfig::relax_dx, "lattice spacing in x");
  o.add(app, "--relax-boundary", &ExperimentConfig::relax_boundary,
        "two_circle | constant | directory of site_<it>_<ix>.csv");
  o.add(app, "--relax-r0", &ExperimentConfig::relax_r0, "first boundary radius");
  o.add(app, "--relax-r1", &ExperimentConfig::relax_r1, "second boundary radius");
  o.add(app, "--relax-perturbation", &ExperimentConfig::relax_perturbation,
        "interior perturbation for the constant boundary");
  o.add(app, "--relax-step", &ExperimentConfig::relax_step, "initial descent step");
  o.add(app, "--relax-max-iters", &ExperimentConfig::relax_max_iters, "descent iteration cap");
  o.add(app, "--relax-tol", &ExperimentConfig::relax_tol, "gradient max-norm tolerance");
  o.add(app, "--relax-residual-every", &ExperimentConfig::relax_residual_every,
        "trace residual interval (0 = never)");
  o.add(app, "--relax-method", &ExperimentConfig::relax_method, "gradient | lbfgs");
  auto* relax_mode = app.add_option("--relax-sobolev-mode", o.relax_sobolev_mode,
                                    "Sobolev discretisation for relax: stencil | spectral");
  o.entries.emplace_back(relax_mode, [&o](ExperimentConfig& c) {
    c = unred::config_from_json({{"relax_sobolev_mode", o.relax_sobolev_mode}}, c);
  });
}

ExperimentConfig load_config(const std::string& path, const Overrides& o) {
  ExperimentConfig c;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw unred::IoError("cannot open config '" + path + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw unred::ValidationError("config '" + path + "': " + e.what());
    }
    c = unred::config_from_json(j, c);
  }
  o.apply(c);
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Un-reduced closed-curve dynamics: simulation, decoupling study, covariant relaxation"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);

  Overrides overrides;
  register_flags(app, overrides);

  auto* sim = app.add_subcommand("simulate", "evolve one curve with explicit Euler");
  std::string initial = "circle";
  sim->add_option("--initial", initial, "\"circle\" or a curve file (x,y per line)");
  auto* dec = app.add_subcommand("decouple", "twin-run decoupling study over dt_list");
  auto* rel = app.add_subcommand("relax", "action descent on the space-time lattice");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const ExperimentConfig config = load_config(config_path, overrides);
    if (sim->parsed()) {
      if (config.op == "curvature_weighted" || config.op == "curvature") {
        std::cerr << "warning: the curvature-weighted IVP is experimental\n";
      }
      const auto s = unred::cmd_simulate(config, initial);
      std::cout << "simulate: " << s.steps << " steps, final time "
                << unred::format_double(s.final_time) << ", max |m_h| "
                << unred::format_double(s.max_abs_m_h) << "\n";
    } else if (dec->parsed()) {
      const auto r = unred::cmd_decouple(config);
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
      for (std::size_t i = 0; i < r.final_distances.size(); ++i) {
        std::cout << "dt " << unred::format_double(config.dt_list[i]) << ": final distance "
                  << unred::format_double(r.final_distances[i]) << "\n";
      }
      std::cout << "verdict: " << (r.pass ? "pass" : "fail") << "\n";
    } else if (rel->parsed()) {
      const auto r = unred::cmd_relax(config);
      std::cout << "relax: " << r.result.iterations << " iterations, action "
                << unred::format_double(r.result.trace.back().action)
                << (r.result.converged ? ", converged" : "")
                << (r.result.stalled ? ", stalled" : "") << ", residual_h "
                << unred::format_double(r.final_residual.max_h) << ", residual_v "
                << unred::format_double(r.final_residual.max_v) << "\n";
    }
  } catch (const unred::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return unred::exit_code(e.kind());
  }
  return 0;
}
