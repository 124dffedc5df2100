#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "disped/dynamics.hpp"
#include "disped/graph.hpp"
#include "disped/load_signal.hpp"

namespace disped {

/// Unit addition/deletion event. Rejoin edges are either listed explicitly or
/// reconstructed from a named benchmark graph restricted to the units present.
struct Event {
  enum class Kind { Remove, Add };
  double t = 0.0;
  Kind kind = Kind::Remove;
  int unit = 0;
  std::optional<double> p_init;              // add: initial allocation (default box midpoint)
  std::vector<GraphEdge> edges;              // add: explicit incident edges
  std::optional<Table1Graph> edges_from;     // add: take incident edges from this graph
};

struct EventSchedule {
  std::vector<Event> events;  // non-decreasing in t
  void validate() const;
  std::vector<double> times() const;  // sorted unique event times
};

/// Sampled run record. Rows span the master unit set; entries of units that
/// are inactive at a sample are NaN (written as empty CSV cells).
struct Trajectory {
  std::vector<int> master_ids;
  std::vector<double> t;
  std::vector<double> mismatch;       // sum(P) - P_l(t)
  std::vector<double> total_cost;     // generation cost of the active units
  std::vector<double> box_violation;  // max per-unit box violation (logged, not asserted)
  std::vector<std::vector<double>> P, z, v;

  struct Epoch {
    double t = 0.0;
    std::vector<int> active;
  };
  std::vector<Epoch> epochs;

  struct AppliedEvent {
    double t = 0.0;
    std::string desc;
  };
  std::vector<AppliedEvent> event_log;

  std::vector<std::string> warnings;
  double max_abs_v_sum = 0.0;
  SimState final_state;
  double final_time = 0.0;

  int find_sample(double time) const;  // index of first sample with t >= time
};

enum class SimMode { Centralized, Distributed };

struct IntegrateOptions {
  double dt = 1e-3;
  double T = 0.0;
  int record_every = 100;
  SimMode mode = SimMode::Distributed;
  /// Distributed-bus load split over master unit ids; empty = uniform over
  /// the active units. Renormalized when the active set changes.
  std::vector<double> load_shares;
};

/// Classical 4-stage fixed-step integration of the selected field. The step
/// grid is split at event times and load discontinuities; events apply
/// between full steps. Throws on invalid initial data, infeasible loads, or
/// an auxiliary-state drift |sum v| > 1e-6 (which would indicate a bug).
/// A violated gain condition is recorded as a warning, not an error.
Trajectory integrate(const GeneratorFleet& master_fleet, const AlgorithmParams& params,
                     const WeightedDigraph& g0, const LoadSignal& load,
                     const EventSchedule& events, const SimState& init,
                     const IntegrateOptions& opts);

/// Box-midpoint allocation, zero estimator states, active = graph vertices.
SimState default_initial_state(const GeneratorFleet& master_fleet, const WeightedDigraph& g0);

/// Token-passing removal: the unit's v value moves to its lowest-id surviving
/// in-neighbor, conserving sum(v). `also_leaving` excludes units that leave
/// in the same batch from receiving the token.
std::pair<SimState, WeightedDigraph> apply_tinv_remove(const SimState& s,
                                                       const WeightedDigraph& g, int unit,
                                                       std::span<const int> also_leaving = {});

/// Joining unit starts with v = 0 (and z = 0); verifies the extended digraph
/// stays strongly connected and weight-balanced.
std::pair<SimState, WeightedDigraph> apply_tinv_add(const SimState& s, const WeightedDigraph& g,
                                                    int unit, std::span<const GraphEdge> edges,
                                                    double p_init);

struct EnvelopeReport {
  bool pass = false;
  double max_ratio = 0.0;
  double x0_norm = 0.0;
  int samples = 0;
  double t0 = 0.0, t1 = 0.0;
};

/// Checks |x(t)| <= (1 + 1e-3) c1 exp(-c2 (t - t0)) |x(t0)| over a constant-
/// load, event-free stretch of a recorded run, with x = (mismatch, nu1 sum z).
EnvelopeReport mismatch_envelope_check(const Trajectory& traj, const MismatchModel& model,
                                       const AlgorithmParams& params, double t0, double t1,
                                       double P_l);

struct Segment {
  double t0 = 0.0, t1 = 0.0;
  double value = 0.0;  // load during the segment
};

/// Constant-load stretches of the signal split at event times.
std::vector<Segment> constant_segments(const LoadSignal& load, const EventSchedule& events,
                                       double T);

}  // namespace disped
