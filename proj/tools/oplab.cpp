#include "oplab/lab/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

std::string find_config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  using oplab::lab::LabConfig;
  LabConfig cfg;
  try {
    const std::string path = find_config_path(argc, argv);
    if (!path.empty()) cfg = LabConfig::load(path);
  } catch (const oplab::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return oplab::lab::kConfigError;
  }

  CLI::App app{"Numerical laboratory for chains of Furuta-type operator inequalities"};
  app.set_help_all_flag("--help-all");
  std::string config_path;
  bool dump = false;
  app.add_option("command", cfg.command, "psi | print-chain | golden | check | search");
  app.add_option("--config", config_path, "JSON config; flags given on the command line override it");
  app.add_flag("--dump-config", dump, "Print the effective config as JSON and exit");
  app.add_option("--mode", cfg.mode, "check mode: necessity | contrapositive | proof-steps | limit | loewner-heinz | theorem-1-2");
  app.add_option("--k", cfg.k, "Number of operators A_1..A_k");
  app.add_option("--dim", cfg.dim, "Matrix dimension (lower end of the range)");
  app.add_option("--dim-max", cfg.dim_max, "Upper end of the dimension range");
  app.add_option("--seed", cfg.seed, "Master seed");
  app.add_option("--count", cfg.count, "Instances per check campaign");
  app.add_option("--budget", cfg.budget, "Tuples drawn by search");
  app.add_option("--jobs", cfg.jobs, "Worker threads");
  app.add_option("--field", cfg.field, "real | complex");
  app.add_option("--p-grid", cfg.p_grid, "Comma-separated p values (each >= 1)");
  app.add_option("--grid-factor", cfg.grid_factor, "Geometric escalation factor for p and s grids");
  app.add_option("--grid-cap", cfg.grid_cap, "Largest value escalation may reach");
  app.add_option("--s-grid", cfg.s_grid, "Comma-separated s values (each > 1) for theorem-1-2");
  app.add_option("--tol-rel", cfg.tol_rel, "Relative tolerance of Loewner comparisons");
  app.add_option("--eps-pd-rel", cfg.eps_pd_rel, "Relative positivity gate for negative or fractional powers");
  app.add_option("--weights", cfg.weights, "necessity | fixed:<csv>");
  app.add_option("--t", cfg.t, "t_1..t_n, comma-separated");
  app.add_option("--p", cfg.p, "p_1..p_2n, comma-separated (psi)");
  app.add_option("--r", cfg.r, "r > t_n");
  app.add_option("--family", cfg.family, "asc | desc | all");
  app.add_option("--member", cfg.member, "Member within the family (0 = all)");
  app.add_option("--scalars", cfg.scalars, "Fixture tuple of scalar multiples of I, comma-separated");
  app.add_option("--tuple", cfg.tuple, "Fixture tuple JSON file {\"matrices\": [...]}");
  app.add_option("--p-scalar", cfg.p_scalar, "theorem-1-2: P = value * I");
  app.add_option("--q-scalar", cfg.q_scalar, "theorem-1-2: Q = value * I");
  app.add_option("--delta", cfg.delta, "theorem-1-2: exponent offset, r + delta > 0");
  app.add_option("--w", cfg.w, "theorem-1-2: outer exponent in (0, 1]");
  app.add_option("--c", cfg.c, "limit: explicit bound instead of one derived from tuples");
  app.add_flag("--ordered", cfg.ordered, "search: draw ordered tuples (control run)");
  app.add_flag("--emit-stats", cfg.emit_stats, "search: include statistics in output and findings");
  app.add_option("--report", cfg.report, "CSV report path (JSON sidecar written next to it)");
  app.add_option("--findings", cfg.findings, "search: findings JSON path");
  app.add_option("--golden-dir", cfg.golden_dir, "golden: directory of golden files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return oplab::lab::kConfigError;
  }
  if (app.count("--dim") && !app.count("--dim-max")) cfg.dim_max = cfg.dim;

  if (dump) {
    std::cout << cfg.to_json().dump(2) << '\n';
    return 0;
  }
  if (cfg.command.empty()) {
    std::cerr << "error: missing command\n" << app.help();
    return oplab::lab::kConfigError;
  }
  return oplab::lab::run_command(cfg, std::cout, std::cerr);
}
