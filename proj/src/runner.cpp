#include "disped/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "disped/kernels.hpp"

namespace disped {

namespace {

nlohmann::json params_to_json(const AlgorithmParams& p) {
  return {{"alpha", p.alpha},
          {"beta", p.beta},
          {"nu1", p.nu1},
          {"nu2", p.nu2},
          {"epsilon", p.epsilon},
          {"r", p.r},
          {"load_mode", p.load_mode == LoadMode::SingleBus ? "single_bus" : "distributed_bus"}};
}

}  // namespace

std::filesystem::path resolve_out_root(const RunOptions& opt) {
  if (!opt.out_root.empty()) return opt.out_root;
  if (const char* env = std::getenv("DISPED_OUT")) return env;
  return "out";
}

RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opt) {
  RunResult res;

  IntegrateOptions sim = cfg.sim;
  if (opt.dt_override) sim.dt = *opt.dt_override;

  const SimState init =
      cfg.init ? *cfg.init : default_initial_state(cfg.fleet, cfg.graph);
  res.traj = integrate(cfg.fleet, cfg.params, cfg.graph, cfg.load, cfg.events, init, sim);

  res.out_dir = resolve_out_root(opt) / cfg.name;
  std::filesystem::create_directories(res.out_dir);
  res.csv_path = res.out_dir / cfg.outputs.csv;
  res.meta_path = res.out_dir / cfg.outputs.meta;
  write_trajectory_csv(res.traj, res.csv_path);

  const SimState& fin = res.traj.final_state;
  const double P_l_end = cfg.load.at(res.traj.final_time).p;
  res.terminal_mismatch = res.traj.mismatch.back();
  res.terminal_cost = res.traj.total_cost.back();

  // Terminal KKT certificate for the active fleet at the terminal load.
  std::vector<int> positions;
  for (int id : fin.active) positions.push_back(id - 1);
  DispatchProblem terminal_problem{cfg.fleet.subset(positions), P_l_end};
  const double kkt_tol = 1e-6 * std::max(1.0, P_l_end);
  res.kkt = kkt_check(terminal_problem, fin.P, cfg.params.epsilon, kkt_tol);
  const DispatchSolution terminal_oracle = solve_lambda_iteration(terminal_problem);
  res.oracle_terminal_cost = terminal_oracle.cost;

  // Envelope checks on every constant-load, event-free stretch.
  const MismatchModel model = mismatch_model(cfg.params);
  if (sim.mode == SimMode::Distributed) {
    for (const Segment& seg : constant_segments(cfg.load, cfg.events, sim.T)) {
      res.envelopes.push_back(
          mismatch_envelope_check(res.traj, model, cfg.params, seg.t0, seg.t1, seg.value));
      res.envelope_ok = res.envelope_ok && res.envelopes.back().pass;
    }
  }

  res.v_ok = res.traj.max_abs_v_sum <= 1e-9;

  // Oracle cost at the end of each constant-load stretch, for the record.
  for (const Segment& seg : constant_segments(cfg.load, cfg.events, sim.T)) {
    const int row = res.traj.find_sample(seg.t1);
    if (row < 0) continue;
    std::vector<int> pos;
    std::vector<double> p_active;
    for (size_t k = 0; k < res.traj.master_ids.size(); ++k) {
      if (std::isnan(res.traj.P[row][k])) continue;
      pos.push_back(static_cast<int>(k));
      p_active.push_back(res.traj.P[row][k]);
    }
    DispatchProblem phase_problem{cfg.fleet.subset(pos), seg.value};
    const DispatchSolution sol = solve_lambda_iteration(phase_problem);
    PhaseResult pr;
    pr.t_end = seg.t1;
    pr.load = seg.value;
    pr.traj_cost = cost_value(phase_problem.fleet, p_active);
    pr.oracle_cost = sol.cost;
    pr.rel_cost_err = std::abs(pr.traj_cost - sol.cost) / std::max(1.0, std::abs(sol.cost));
    res.phases.push_back(pr);
  }

  res.exit_code = (res.kkt.ok && res.envelope_ok && res.v_ok) ? 0 : 1;

  nlohmann::json meta;
  meta["scenario"] = cfg.name;
  meta["schema_version"] = cfg.schema_version;
  meta["graph"] = cfg.graph_name.empty() ? "inline" : cfg.graph_name;
  meta["fleet"] = cfg.fleet_ref.empty() ? "inline" : cfg.fleet_ref;
  meta["params"] = params_to_json(cfg.params);
  meta["load"] = load_signal_to_json(cfg.load);
  meta["sim"] = {{"dt", sim.dt},
                 {"T", sim.T},
                 {"record_every", sim.record_every},
                 {"mode", sim.mode == SimMode::Distributed ? "distributed" : "centralized"}};
  meta["kernels"] = kernels::active().name;
  meta["warnings"] = res.traj.warnings;
  auto& ev = meta["events_applied"] = nlohmann::json::array();
  for (const auto& e : res.traj.event_log) ev.push_back({{"t", e.t}, {"desc", e.desc}});
  meta["box_violation"] = {{"max", *std::max_element(res.traj.box_violation.begin(),
                                                     res.traj.box_violation.end())},
                           {"terminal", res.traj.box_violation.back()}};
  meta["checks"] = {{"kkt_ok", res.kkt.ok},
                    {"kkt_detail", res.kkt.detail},
                    {"envelope_ok", res.envelope_ok},
                    {"v_conservation_ok", res.v_ok},
                    {"max_abs_v_sum", res.traj.max_abs_v_sum}};
  meta["terminal"] = {{"t", res.traj.final_time},
                      {"mismatch", res.terminal_mismatch},
                      {"cost", res.terminal_cost},
                      {"oracle_cost", *res.oracle_terminal_cost},
                      {"mu_witness", res.kkt.mu_witness ? nlohmann::json(*res.kkt.mu_witness)
                                                        : nlohmann::json()}};
  auto& phases = meta["phases"] = nlohmann::json::array();
  for (const PhaseResult& p : res.phases)
    phases.push_back({{"t_end", p.t_end},
                      {"load", p.load},
                      {"cost", p.traj_cost},
                      {"oracle_cost", p.oracle_cost},
                      {"rel_cost_err", p.rel_cost_err}});
  auto& envs = meta["envelopes"] = nlohmann::json::array();
  for (const EnvelopeReport& e : res.envelopes)
    envs.push_back({{"t0", e.t0},
                    {"t1", e.t1},
                    {"pass", e.pass},
                    {"max_ratio", e.max_ratio},
                    {"x0_norm", e.x0_norm}});
  std::ofstream meta_out(res.meta_path);
  meta_out << meta.dump(2) << "\n";

  if (!opt.quiet) {
    std::cout << "scenario " << cfg.name << " (" << kernels::active().name << " kernels)\n";
    std::cout << "  terminal mismatch: " << res.terminal_mismatch << "\n";
    std::cout << "  terminal cost:     " << res.terminal_cost << "\n";
    std::cout << "  oracle cost:       " << *res.oracle_terminal_cost << "\n";
    std::cout << "  kkt:               " << (res.kkt.ok ? "ok" : "FAIL") << " ("
              << res.kkt.detail << ")\n";
    std::cout << "  envelope:          "
              << (res.envelopes.empty() ? "n/a" : (res.envelope_ok ? "ok" : "FAIL")) << "\n";
    std::cout << "  v conservation:    " << (res.v_ok ? "ok" : "FAIL")
              << " (max |sum v| = " << res.traj.max_abs_v_sum << ")\n";
    for (const std::string& w : res.traj.warnings) std::cout << "  warning: " << w << "\n";
    std::cout << "  csv:  " << res.csv_path.string() << "\n";
    std::cout << "  meta: " << res.meta_path.string() << "\n";
  }
  return res;
}

}  // namespace disped
