#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "disped/oracle.hpp"
#include "disped/simulator.hpp"

namespace disped {

/// One simulation scenario as described by a JSON config file.
struct ScenarioConfig {
  int schema_version = 1;
  std::string name;
  std::string graph_name;  // benchmark name, empty for inline graphs
  WeightedDigraph graph;
  std::string fleet_ref;  // as written in the config
  GeneratorFleet fleet;
  LoadSignal load = LoadSignal::constant(0.0);
  EventSchedule events;
  AlgorithmParams params;
  IntegrateOptions sim;
  std::optional<SimState> init;  // default: box midpoints, z = v = 0

  struct Outputs {
    std::string csv;
    std::string meta;
  } outputs;
};

/// Parses a scenario file. Errors carry the file name and, for semantic
/// problems, the JSON path of the offending field.
ScenarioConfig load_scenario(const std::filesystem::path& file);

/// Trajectory CSV: header t,mismatch,total_cost,P_1..P_n,z_1..z_n,v_1..v_n;
/// inactive units emit empty cells. Shortest round-trip number formatting
/// keeps the output bit-identical for identical runs.
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;  // NaN for empty cells
  int rows = 0;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace disped
