#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "disped/scenario.hpp"

namespace disped {

struct RunOptions {
  std::filesystem::path out_root;  // empty: DISPED_OUT or ./out
  std::optional<double> dt_override;
  bool quiet = false;
};

/// End-of-segment cost comparison against the dispatch oracle.
struct PhaseResult {
  double t_end = 0.0;
  double load = 0.0;
  double traj_cost = 0.0;
  double oracle_cost = 0.0;
  double rel_cost_err = 0.0;
};

struct RunResult {
  Trajectory traj;
  KktReport kkt;
  std::vector<EnvelopeReport> envelopes;
  bool envelope_ok = true;
  bool v_ok = true;
  std::vector<PhaseResult> phases;
  double terminal_mismatch = 0.0;
  double terminal_cost = 0.0;
  std::optional<double> oracle_terminal_cost;
  std::filesystem::path out_dir;
  std::filesystem::path csv_path;
  std::filesystem::path meta_path;
  int exit_code = 0;  // 0 iff kkt, envelope, and v-conservation checks pass
};

/// Integrates the scenario, writes the CSV + metadata artifacts, evaluates
/// the KKT / envelope / conservation checks, and prints a short report
/// (unless quiet).
RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opt);

std::filesystem::path resolve_out_root(const RunOptions& opt);

}  // namespace disped
