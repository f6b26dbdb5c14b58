// Command-line front end for the experiments.
//
//   dlnsd convergence [--theta 0.2,0.5,0.7] [--n 10,16,22] [--scheme dln|bdf2|both] [--full]
//   dlnsd varstep     [--theta ...] [--n 100] [--steps 40]
//   dlnsd coeffs      [--theta ...] [--steps 40]

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "dlnsd/harness.hpp"

namespace {

struct Common {
  std::string config;
  std::string theta;
  std::string n;
  std::string scheme;
  std::string elements;
  std::string viscous;
  std::string out;
  int steps = -1;
  bool full = false;
  bool no_vtk = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "key = value configuration file");
  app->add_option("--theta", c.theta, "comma-separated theta values in [0,1]");
  app->add_option("--n", c.n, "comma-separated mesh resolutions");
  app->add_option("--scheme", c.scheme, "dln, bdf2 or both");
  app->add_option("--elements", c.elements, "mini or taylor-hood");
  app->add_option("--viscous", c.viscous, "symmetric (2 nu D:D) or gradient (nu grad:grad)");
  app->add_option("--out", c.out, "output directory");
}

dlnsd::ExperimentConfig make_config(const std::string& experiment, const Common& c) {
  dlnsd::ExperimentConfig cfg =
      c.config.empty() ? dlnsd::ExperimentConfig::defaults_for(experiment) : dlnsd::ExperimentConfig::load(c.config);
  if (cfg.experiment != experiment) {
    const auto out = cfg.out_dir;
    cfg = dlnsd::ExperimentConfig::defaults_for(experiment);
    cfg.out_dir = out;
  }
  if (c.full) cfg.resolutions = {10, 16, 22, 28, 34};
  if (!c.theta.empty()) cfg.set("theta", c.theta);
  if (!c.scheme.empty()) cfg.set("scheme", c.scheme);
  if (!c.elements.empty()) cfg.set("elements", c.elements);
  if (!c.viscous.empty()) cfg.set("viscous", c.viscous);
  if (!c.out.empty()) cfg.set("out", c.out);
  if (!c.n.empty()) {
    if (experiment == "varstep") {
      cfg.set("mesh_divisions", c.n);
    } else {
      cfg.set("n", c.n);
    }
  }
  if (c.steps > 0) cfg.computed_steps = c.steps;
  if (c.no_vtk) cfg.write_vtk = false;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variable-step DLN solver for the coupled Stokes/Darcy model"};
  app.require_subcommand(1);

  Common conv, var, coef;
  auto* c_conv = app.add_subcommand("convergence", "constant-step convergence study (h = dt = 1/n)");
  add_common(c_conv, conv);
  c_conv->add_flag("--full", conv.full, "add the n = 28, 34 resolutions");

  auto* c_var = app.add_subcommand("varstep", "variable-step stability run");
  add_common(c_var, var);
  c_var->add_option("--steps", var.steps, "computed DLN steps");
  c_var->add_flag("--no-vtk", var.no_vtk, "skip VTK snapshots");

  auto* c_coef = app.add_subcommand("coeffs", "dump DLN coefficients along the variable-step schedule");
  add_common(c_coef, coef);
  c_coef->add_option("--steps", coef.steps, "computed DLN steps");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_conv->parsed()) {
      const auto cfg = make_config("convergence", conv);
      const auto rep = dlnsd::run_convergence(cfg);
      dlnsd::write_convergence_table(std::cout, rep, true);
      for (const auto& p : dlnsd::emit_outputs(rep, cfg.out_dir)) std::cout << "wrote " << p.string() << "\n";
    } else if (c_var->parsed()) {
      const auto cfg = make_config("varstep", var);
      const auto rep = dlnsd::run_varstep(cfg, true);
      std::cout << "steps " << rep.schedule.size() - 1 << ", final time " << rep.schedule.t_end() << "\n";
      for (const auto& r : rep.runs) {
        std::cout << "theta " << r.theta << ": relative L2 error " << r.final_relative_error
                  << ", identity residual " << r.verdict.max_identity_residual << ", budget residual "
                  << r.verdict.max_budget_residual << ", max |Bu| " << r.max_divergence
                  << ", factorizations " << r.factorizations << ", " << r.wall_seconds << " s"
                  << (r.verdict.ok ? "" : "  [energy check failed]") << "\n";
      }
      std::cout << "wrote results to " << cfg.out_dir.string() << "\n";
    } else if (c_coef->parsed()) {
      const auto cfg = make_config("coeffs", coef);
      const auto sched = dlnsd::varstep_schedule(cfg.computed_steps);
      if (coef.out.empty()) {
        dlnsd::write_coefficients_csv(std::cout, sched, cfg.thetas);
      } else {
        std::filesystem::create_directories(cfg.out_dir);
        std::ofstream f(cfg.out_dir / "coefficients.csv");
        if (!f) throw std::runtime_error("cannot write coefficients.csv");
        dlnsd::write_coefficients_csv(f, sched, cfg.thetas);
      }
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
