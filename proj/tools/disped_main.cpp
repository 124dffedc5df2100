// disped: simulate and analyze distributed economic-dispatch coordination.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "disped/kernels.hpp"
#include "disped/oracle.hpp"
#include "disped/runner.hpp"
#include "disped/svg.hpp"

namespace fs = std::filesystem;
using namespace disped;

namespace {

nlohmann::json load_json_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  return nlohmann::json::parse(in);
}

int cmd_run(const std::vector<std::string>& configs, const RunOptions& opt) {
  int worst = 0;
  for (const std::string& cfg_path : configs) {
    const ScenarioConfig cfg = load_scenario(cfg_path);
    const RunResult res = run_scenario(cfg, opt);
    worst = std::max(worst, res.exit_code);
  }
  return worst;
}

int cmd_solve(const fs::path& problem_file, const fs::path& out_file) {
  const nlohmann::json j = load_json_file(problem_file);
  GeneratorFleet fleet;
  if (j.at("fleet").is_string()) {
    fs::path fp = j.at("fleet").get<std::string>();
    if (fp.is_relative()) fp = problem_file.parent_path() / fp;
    fleet = fleet_from_json(load_json_file(fp));
  } else {
    fleet = fleet_from_json(j.at("fleet"));
  }
  DispatchProblem problem{std::move(fleet), j.at("load").get<double>()};
  const DispatchSolution sol = solve_lambda_iteration(problem);

  nlohmann::json out = {{"P_star", sol.p}, {"mu", sol.mu}, {"cost", sol.cost}};
  if (out_file.empty()) {
    std::cout << out.dump(2) << "\n";
  } else {
    std::ofstream f(out_file);
    f << out.dump(2) << "\n";
    std::cout << "wrote " << out_file.string() << "\n";
  }
  return 0;
}

int cmd_check_params(const fs::path& config, double M1, double M2, double rho) {
  const ScenarioConfig cfg = load_scenario(config);
  const LaplacianBundle bundle = build_laplacian(cfg.graph);
  const ConditionReport spectral = check_param_condition(bundle, cfg.params);
  const GraphBounds bounds = consensus_bounds(cfg.graph);
  const ConditionReport dist = check_param_condition_distributed(bounds, cfg.params);
  const MismatchModel model = mismatch_model(cfg.params);
  const double eps_bound = epsilon_bound(cfg.fleet, cfg.load.at(0.0).p);

  std::cout << "graph: n = " << cfg.graph.order() << ", lambda2(L+L^T) = " << bundle.lambda2_sym
            << ", lambda_max(L^T L) = " << bundle.lambda_max_ltl << "\n";
  std::cout << "spectral gain condition: lhs = " << spectral.lhs << ", rhs = " << spectral.rhs
            << " -> " << (spectral.ok ? "ok" : "NOT satisfied") << "\n";
  std::cout << "distributed gain condition (n_max = " << bounds.n_max
            << ", d_max_out = " << bounds.d_max_out << ", a_min = " << bounds.a_min
            << "): lhs = " << dist.lhs << ", rhs = " << dist.rhs << " -> "
            << (dist.ok ? "ok" : "NOT satisfied") << "\n";
  std::cout << "penalty bound: epsilon = " << cfg.params.epsilon << ", admissible < "
            << eps_bound << " -> " << (cfg.params.epsilon < eps_bound ? "ok" : "NOT admissible")
            << "\n";
  std::cout << "mismatch rates: c1 = " << model.c1 << ", c2 = " << model.c2 << "\n";
  if (M1 >= 0.0 && M2 >= 0.0 && rho > 0.0)
    std::cout << "recovery time t_rho(M1 = " << M1 << ", M2 = " << M2 << ", rho = " << rho
              << ") = " << t_rho(cfg.params, M1, M2, rho) << "\n";
  return spectral.ok ? 0 : 1;
}

int cmd_bounds(const fs::path& config, double d1, double d2, double M1, double M2, double rho) {
  const ScenarioConfig cfg = load_scenario(config);
  const MismatchModel model = mismatch_model(cfg.params);
  if (d1 < 0.0 || d2 < 0.0) {
    if (auto db = cfg.load.derivative_bounds()) {
      d1 = db->first;
      d2 = db->second;
    } else {
      throw std::runtime_error(
          "load signal has no derivative bounds; pass --d1 and --d2 explicitly");
    }
  }
  std::cout << "c1 = " << model.c1 << ", c2 = " << model.c2 << "\n";
  std::cout << "load derivative bounds: d1 = " << d1 << ", d2 = " << d2 << "\n";
  std::cout << "ultimate mismatch bound (c1/c2)(alpha d1 + d2) = "
            << ultimate_bound(cfg.params, d1, d2) << "\n";
  if (M1 >= 0.0 && M2 >= 0.0 && rho > 0.0)
    std::cout << "t_rho(M1 = " << M1 << ", M2 = " << M2 << ", rho = " << rho
              << ") = " << t_rho(cfg.params, M1, M2, rho) << "\n";
  return 0;
}

int cmd_plot(const fs::path& csv, const std::string& panel, fs::path out) {
  const CsvTable table = read_csv(csv);
  if (out.empty()) out = csv.parent_path() / (csv.stem().string() + "." + panel + ".svg");
  write_panel_from_csv(table, panel, out);
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributed economic dispatch simulator"};
  app.require_subcommand(1);

  std::string kernels_flag;
  app.add_option("--kernels", kernels_flag, "force kernel isa (scalar|avx2)");

  // run
  auto* run = app.add_subcommand("run", "integrate a scenario and write csv + metadata");
  std::vector<std::string> run_configs;
  run->add_option("config", run_configs, "scenario config file(s)");
  bool run_all = false;
  run->add_flag("--all", run_all, "run every bundled scenario");
  std::string scenario_dir = "scenarios";
  run->add_option("--scenario-dir", scenario_dir, "directory scanned by --all");
  RunOptions ropt;
  std::string out_dir;
  run->add_option("--out", out_dir, "output root (default DISPED_OUT or ./out)");
  double dt_override = -1.0;
  run->add_option("--dt", dt_override, "override integration step");

  // solve
  auto* solve = app.add_subcommand("solve", "solve a dispatch problem with the oracle");
  std::string problem_file, solve_out;
  solve->add_option("problem", problem_file, "problem json {fleet, load}")->required();
  solve->add_option("-o,--out", solve_out, "write solution json here instead of stdout");

  // check-params
  auto* check = app.add_subcommand("check-params", "evaluate gain and penalty conditions");
  std::string check_config;
  check->add_option("config", check_config, "scenario config file")->required();
  double M1 = -1.0, M2 = -1.0, rho = -1.0;
  check->add_option("--M1", M1, "mismatch magnitude at the disturbance");
  check->add_option("--M2", M2, "estimate-sum magnitude at the disturbance");
  check->add_option("--rho", rho, "target mismatch level");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "print c1, c2, ultimate bound, t_rho");
  std::string bounds_config;
  bounds->add_option("config", bounds_config, "scenario config file")->required();
  double d1 = -1.0, d2 = -1.0;
  bounds->add_option("--d1", d1, "bound on |dP_l/dt| (default: from the load signal)");
  bounds->add_option("--d2", d2, "bound on |d2P_l/dt2| (default: from the load signal)");
  double bM1 = -1.0, bM2 = -1.0, brho = -1.0;
  bounds->add_option("--M1", bM1, "mismatch magnitude at the disturbance");
  bounds->add_option("--M2", bM2, "estimate-sum magnitude at the disturbance");
  bounds->add_option("--rho", brho, "target mismatch level");

  // plot
  auto* plot = app.add_subcommand("plot", "render a trajectory csv panel as svg");
  std::string csv_file, panel = "mismatch", plot_out;
  plot->add_option("csv", csv_file, "trajectory csv from 'run'")->required();
  plot->add_option("--panel", panel, "alloc | cost | mismatch");
  plot->add_option("-o,--out", plot_out, "output svg path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!kernels_flag.empty()) {
      if (kernels_flag == "scalar")
        kernels::select(kernels::Isa::Scalar);
      else if (kernels_flag == "avx2")
        kernels::select(kernels::Isa::Avx2);
      else
        throw std::runtime_error("--kernels must be scalar or avx2");
    }

    if (run->parsed()) {
      if (!out_dir.empty()) ropt.out_root = out_dir;
      if (dt_override > 0.0) ropt.dt_override = dt_override;
      if (run_all) {
        for (const auto& entry : fs::directory_iterator(scenario_dir))
          if (entry.path().extension() == ".json") run_configs.push_back(entry.path().string());
        std::sort(run_configs.begin(), run_configs.end());
      }
      if (run_configs.empty()) throw std::runtime_error("run: no scenario configs given");
      return cmd_run(run_configs, ropt);
    }
    if (solve->parsed()) return cmd_solve(problem_file, solve_out);
    if (check->parsed()) return cmd_check_params(check_config, M1, M2, rho);
    if (bounds->parsed()) return cmd_bounds(bounds_config, d1, d2, bM1, bM2, brho);
    if (plot->parsed()) return cmd_plot(csv_file, panel, plot_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
