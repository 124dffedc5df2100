#include "disped/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "disped/kernels.hpp"

namespace disped {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string describe(const Event& e) {
  if (e.kind == Event::Kind::Remove) return "remove unit " + std::to_string(e.unit);
  return "add unit " + std::to_string(e.unit);
}

// State layout and epoch-local structures for one stretch between events.
struct EpochContext {
  WeightedDigraph graph;
  GeneratorFleet fleet;  // active subset, sorted by unit id
  LaplacianBundle bundle;
  double epsilon = 0.0;
  int n = 0;
  int r_index = -1;                    // single-bus drive slot
  std::vector<double> shares;          // distributed-bus split, sums to 1
  std::vector<double> drive;           // scratch
  FieldWorkspace ws;

  const PenaltyCost& pc() const { return *pc_; }
  void rebuild(const GeneratorFleet& master, const std::vector<double>& master_shares,
               int current_r) {
    graph.validate();
    n = graph.order();
    std::vector<int> positions(n);
    for (int k = 0; k < n; ++k) positions[k] = graph.ids[k] - 1;
    fleet = master.subset(positions);
    pc_.emplace(fleet, epsilon);
    bundle = build_laplacian(graph);
    drive.assign(n, 0.0);
    ws.resize(n);
    r_index = graph.index_of(current_r);
    shares.assign(n, 1.0 / n);
    if (!master_shares.empty()) {
      double total = 0.0;
      for (int k = 0; k < n; ++k) total += master_shares.at(graph.ids[k] - 1);
      if (total <= 0.0) throw std::invalid_argument("integrate: load shares sum to zero");
      for (int k = 0; k < n; ++k) shares[k] = master_shares.at(graph.ids[k] - 1) / total;
    }
  }

 private:
  std::optional<PenaltyCost> pc_;
};

void eval_field(EpochContext& ctx, SimMode mode, const AlgorithmParams& params,
                const LoadSignal& load, double t, const double* y, double* dy) {
  const int n = ctx.n;
  const double P_l = load.at(t).p;
  if (mode == SimMode::Centralized) {
    centralized_field(ctx.bundle.L, ctx.pc(), P_l, {y, size_t(n)}, {dy, size_t(n)}, ctx.ws);
    return;
  }
  if (params.load_mode == LoadMode::SingleBus) {
    std::fill(ctx.drive.begin(), ctx.drive.end(), 0.0);
    ctx.drive[ctx.r_index] = P_l;
  } else {
    for (int i = 0; i < n; ++i) ctx.drive[i] = ctx.shares[i] * P_l;
  }
  distributed_field(ctx.bundle.L, ctx.pc(), params, ctx.drive, {y, size_t(n)},
                    {y + n, size_t(n)}, {y + 2 * n, size_t(n)}, {dy, size_t(n)},
                    {dy + n, size_t(n)}, {dy + 2 * n, size_t(n)}, ctx.ws);
}

struct Rk4Buffers {
  std::vector<double> k1, k2, k3, k4, tmp;
  void resize(int m) {
    k1.resize(m);
    k2.resize(m);
    k3.resize(m);
    k4.resize(m);
    tmp.resize(m);
  }
};

void rk4_step(EpochContext& ctx, SimMode mode, const AlgorithmParams& params,
              const LoadSignal& load, double t, double h, std::vector<double>& y,
              Rk4Buffers& b) {
  const int m = static_cast<int>(y.size());
  const auto& K = kernels::active();
  eval_field(ctx, mode, params, load, t, y.data(), b.k1.data());
  K.add_scaled(m, y.data(), 0.5 * h, b.k1.data(), b.tmp.data());
  eval_field(ctx, mode, params, load, t + 0.5 * h, b.tmp.data(), b.k2.data());
  K.add_scaled(m, y.data(), 0.5 * h, b.k2.data(), b.tmp.data());
  eval_field(ctx, mode, params, load, t + 0.5 * h, b.tmp.data(), b.k3.data());
  K.add_scaled(m, y.data(), h, b.k3.data(), b.tmp.data());
  eval_field(ctx, mode, params, load, t + h, b.tmp.data(), b.k4.data());
  K.rk4_combine(m, y.data(), h / 6.0, b.k1.data(), b.k2.data(), b.k3.data(), b.k4.data(),
                y.data());
}

double max_box_gradient(const GeneratorFleet& fleet) {
  double g = 0.0;
  for (int k = 0; k < fleet.size(); ++k) {
    const GeneratorUnit& u = fleet.unit(k);
    g = std::max(g, std::abs(u.b + 2.0 * u.c * u.pmin));
    g = std::max(g, std::abs(u.b + 2.0 * u.c * u.pmax));
  }
  return g;
}

}  // namespace

void EventSchedule::validate() const {
  for (size_t k = 0; k < events.size(); ++k) {
    if (events[k].t < 0.0) throw std::invalid_argument("events: times must be >= 0");
    if (k > 0 && events[k].t < events[k - 1].t)
      throw std::invalid_argument("events: times must be non-decreasing");
    if (events[k].unit <= 0) throw std::invalid_argument("events: unit ids must be positive");
  }
}

std::vector<double> EventSchedule::times() const {
  std::vector<double> out;
  for (const Event& e : events) out.push_back(e.t);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int Trajectory::find_sample(double time) const {
  auto it = std::lower_bound(t.begin(), t.end(), time - 1e-9);
  if (it == t.end()) return -1;
  return static_cast<int>(it - t.begin());
}

SimState default_initial_state(const GeneratorFleet& master_fleet, const WeightedDigraph& g0) {
  SimState s;
  s.active = g0.ids;
  for (int id : g0.ids) {
    const GeneratorUnit& u = master_fleet.unit(id - 1);
    s.P.push_back(0.5 * (u.pmin + u.pmax));
  }
  s.z.assign(g0.order(), 0.0);
  s.v.assign(g0.order(), 0.0);
  return s;
}

std::pair<SimState, WeightedDigraph> apply_tinv_remove(const SimState& s,
                                                       const WeightedDigraph& g, int unit,
                                                       std::span<const int> also_leaving) {
  const int idx = g.index_of(unit);
  if (idx < 0 || !std::binary_search(s.active.begin(), s.active.end(), unit))
    throw std::invalid_argument("tinv remove: unit " + std::to_string(unit) + " not active");

  // In-neighbors of the leaving unit are the units it can send the token to:
  // edge (w, unit) means `unit` sends information to w.
  int recipient = -1;
  for (const GraphEdge& e : g.edges) {
    if (e.j != unit) continue;
    const bool leaving = e.i == unit ||
                         std::find(also_leaving.begin(), also_leaving.end(), e.i) !=
                             also_leaving.end();
    if (!leaving && (recipient < 0 || e.i < recipient)) recipient = e.i;
  }
  if (recipient < 0)
    throw std::invalid_argument("tinv remove: unit " + std::to_string(unit) +
                                " has no surviving in-neighbor");

  SimState out = s;
  out.v[g.index_of(recipient)] += out.v[idx];
  out.P.erase(out.P.begin() + idx);
  out.z.erase(out.z.begin() + idx);
  out.v.erase(out.v.begin() + idx);
  out.active.erase(out.active.begin() + idx);
  const int drop[] = {unit};
  return {std::move(out), remove_vertices(g, drop)};
}

std::pair<SimState, WeightedDigraph> apply_tinv_add(const SimState& s, const WeightedDigraph& g,
                                                    int unit, std::span<const GraphEdge> edges,
                                                    double p_init) {
  if (g.has_vertex(unit))
    throw std::invalid_argument("tinv add: unit " + std::to_string(unit) + " already active");
  WeightedDigraph g2 = add_vertex(g, unit, edges);
  const LaplacianBundle bundle = build_laplacian(g2);
  if (!bundle.is_strongly_connected || !bundle.is_weight_balanced)
    throw std::invalid_argument(
        "tinv add: extended digraph is not strongly connected and weight-balanced");
  SimState out = s;
  const int idx = g2.index_of(unit);
  out.P.insert(out.P.begin() + idx, p_init);
  out.z.insert(out.z.begin() + idx, 0.0);
  out.v.insert(out.v.begin() + idx, 0.0);
  out.active.insert(out.active.begin() + idx, unit);
  return {std::move(out), std::move(g2)};
}

Trajectory integrate(const GeneratorFleet& master_fleet, const AlgorithmParams& params,
                     const WeightedDigraph& g0, const LoadSignal& load,
                     const EventSchedule& events, const SimState& init,
                     const IntegrateOptions& opts) {
  params.validate();
  events.validate();
  g0.validate();
  if (!(opts.dt > 0.0)) throw std::invalid_argument("integrate: dt must be > 0");
  if (!(opts.T >= 0.0)) throw std::invalid_argument("integrate: T must be >= 0");
  if (!opts.load_shares.empty() &&
      static_cast<int>(opts.load_shares.size()) != master_fleet.size())
    throw std::invalid_argument("integrate: load_shares must cover the master fleet");
  for (int id : g0.ids)
    if (id > master_fleet.size())
      throw std::invalid_argument("integrate: graph vertex id beyond master fleet");
  if (init.active != g0.ids)
    throw std::invalid_argument("integrate: initial active set must match the digraph");
  const size_t n0 = init.active.size();
  if (init.P.size() != n0) throw std::invalid_argument("integrate: init.P length mismatch");

  const bool distributed = opts.mode == SimMode::Distributed;
  if (distributed) {
    if (init.z.size() != n0 || init.v.size() != n0)
      throw std::invalid_argument("integrate: init.z/init.v length mismatch");
    double vsum = 0.0, vmax = 0.0;
    for (double x : init.v) {
      vsum += x;
      vmax = std::max(vmax, std::abs(x));
    }
    if (std::abs(vsum) > 1e-9 * std::max(1.0, vmax))
      throw std::invalid_argument("integrate: initial v must lie in H_0 (sum v = 0)");
  }

  const double eps_bound = max_box_gradient(master_fleet) > 0.0
                               ? 1.0 / (2.0 * max_box_gradient(master_fleet))
                               : std::numeric_limits<double>::infinity();
  if (!(params.epsilon < eps_bound))
    throw std::invalid_argument("integrate: epsilon violates the exact-penalty bound " +
                                std::to_string(eps_bound));

  Trajectory traj;
  traj.master_ids.resize(master_fleet.size());
  for (int k = 0; k < master_fleet.size(); ++k) traj.master_ids[k] = k + 1;

  EpochContext ctx;
  ctx.graph = g0;
  ctx.epsilon = params.epsilon;
  int current_r = params.r;
  if (distributed && params.load_mode == LoadMode::SingleBus && g0.index_of(current_r) < 0)
    throw std::invalid_argument("integrate: load-informed unit r is not active");
  for (const Event& e : events.events)
    if (!(e.t > 0.0 && e.t < opts.T))
      throw std::invalid_argument("integrate: event times must lie strictly inside (0, T)");
  ctx.rebuild(master_fleet, opts.load_shares, current_r);

  auto note_epoch = [&](double t) {
    traj.epochs.push_back({t, ctx.graph.ids});
    if (!ctx.bundle.is_strongly_connected || !ctx.bundle.is_weight_balanced)
      throw std::invalid_argument(
          "integrate: digraph must stay strongly connected and weight-balanced");
    if (distributed) {
      const ConditionReport cond = check_param_condition(ctx.bundle, params);
      if (!cond.ok)
        traj.warnings.push_back("gain condition violated at t = " + std::to_string(t) +
                                " (lhs " + std::to_string(cond.lhs) + " >= rhs " +
                                std::to_string(cond.rhs) + ")");
    }
  };
  note_epoch(0.0);

  // Flat state vector: P | z | v (distributed) or just P (centralized).
  std::vector<double> y;
  auto pack = [&](const SimState& s) {
    y.clear();
    y.insert(y.end(), s.P.begin(), s.P.end());
    if (distributed) {
      y.insert(y.end(), s.z.begin(), s.z.end());
      y.insert(y.end(), s.v.begin(), s.v.end());
    }
  };
  auto unpack = [&]() {
    SimState s;
    const int n = ctx.n;
    s.active = ctx.graph.ids;
    s.P.assign(y.begin(), y.begin() + n);
    if (distributed) {
      s.z.assign(y.begin() + n, y.begin() + 2 * n);
      s.v.assign(y.begin() + 2 * n, y.end());
    } else {
      s.z.assign(n, 0.0);
      s.v.assign(n, 0.0);
    }
    return s;
  };
  pack(init);

  Rk4Buffers buffers;
  buffers.resize(static_cast<int>(y.size()));

  auto record = [&](double t) {
    const int n = ctx.n;
    const double P_l = load.at(t).p;
    const auto& K = kernels::active();
    const double total = K.sum(n, y.data());
    if (!(ctx.fleet.sum_pmin() < P_l && P_l < ctx.fleet.sum_pmax()))
      throw std::invalid_argument("integrate: load " + std::to_string(P_l) +
                                  " infeasible for the active fleet at t = " +
                                  std::to_string(t));
    traj.t.push_back(t);
    traj.mismatch.push_back(total - P_l);
    traj.total_cost.push_back(cost_value(ctx.fleet, {y.data(), size_t(n)}));
    double viol = 0.0;
    for (int k = 0; k < n; ++k) {
      const GeneratorUnit& u = ctx.fleet.unit(k);
      viol = std::max(viol, std::max(y[k] - u.pmax, u.pmin - y[k]));
    }
    traj.box_violation.push_back(std::max(0.0, viol));

    std::vector<double> rowP(master_fleet.size(), kNaN);
    std::vector<double> rowz(master_fleet.size(), kNaN);
    std::vector<double> rowv(master_fleet.size(), kNaN);
    for (int k = 0; k < n; ++k) {
      const int col = ctx.graph.ids[k] - 1;
      rowP[col] = y[k];
      if (distributed) {
        rowz[col] = y[n + k];
        rowv[col] = y[2 * n + k];
      }
    }
    traj.P.push_back(std::move(rowP));
    traj.z.push_back(std::move(rowz));
    traj.v.push_back(std::move(rowv));
  };

  auto check_v_drift = [&]() {
    if (!distributed) return;
    const double vs = std::abs(kernels::active().sum(ctx.n, y.data() + 2 * ctx.n));
    traj.max_abs_v_sum = std::max(traj.max_abs_v_sum, vs);
    if (vs > 1e-6)
      throw std::runtime_error("integrate: |sum v| drifted to " + std::to_string(vs) +
                               " (implementation bug)");
  };

  // Step boundaries: event times plus load discontinuities plus T.
  std::vector<double> boundaries = load.grid_splits(opts.T);
  for (double te : events.times()) boundaries.push_back(te);
  if (opts.T > 0.0) boundaries.push_back(opts.T);
  std::sort(boundaries.begin(), boundaries.end());
  boundaries.erase(std::unique(boundaries.begin(), boundaries.end()), boundaries.end());
  std::erase_if(boundaries, [&](double b) { return b <= 0.0 || b > opts.T; });

  record(0.0);
  check_v_drift();

  const std::set<double> event_times(events.times().begin(), events.times().end());
  long step_count = 0;
  double t = 0.0;
  for (double tb : boundaries) {
    while (t < tb - 1e-12 * std::max(1.0, tb)) {
      const double h = std::min(opts.dt, tb - t);
      rk4_step(ctx, opts.mode, params, load, t, h, y, buffers);
      t += h;
      ++step_count;
      check_v_drift();
      if (opts.record_every > 0 && step_count % opts.record_every == 0 &&
          t < tb - 1e-12 * std::max(1.0, tb))
        record(t);
    }
    t = tb;
    record(t);  // boundary sample (pre-event when events fire here)

    if (event_times.count(tb) > 0 && tb < opts.T) {
      SimState s = unpack();
      WeightedDigraph g = ctx.graph;

      std::vector<Event> batch;
      for (const Event& e : events.events)
        if (e.t == tb) batch.push_back(e);
      std::stable_sort(batch.begin(), batch.end(), [](const Event& a, const Event& b) {
        if (a.kind != b.kind) return a.kind == Event::Kind::Remove;
        return a.unit < b.unit;
      });

      std::vector<int> leaving;
      for (const Event& e : batch)
        if (e.kind == Event::Kind::Remove) leaving.push_back(e.unit);

      for (const Event& e : batch) {
        if (e.kind == Event::Kind::Remove) {
          std::tie(s, g) = apply_tinv_remove(s, g, e.unit, leaving);
        } else {
          std::vector<GraphEdge> edges = e.edges;
          if (e.edges_from) {
            // Reconstruct the unit's incident edges from the named graph,
            // restricted to the vertices present at this point of the batch.
            const WeightedDigraph ref = table1_graph(*e.edges_from);
            for (const GraphEdge& re : ref.edges) {
              if (re.i == e.unit && g.has_vertex(re.j)) edges.push_back(re);
              if (re.j == e.unit && g.has_vertex(re.i)) edges.push_back(re);
            }
          }
          double p0;
          if (e.p_init) {
            p0 = *e.p_init;
          } else {
            const GeneratorUnit& u = master_fleet.unit(e.unit - 1);
            p0 = 0.5 * (u.pmin + u.pmax);
          }
          // Validity of the extended digraph is re-verified after the whole
          // batch; intermediate states may be transiently disconnected.
          WeightedDigraph g2 = add_vertex(g, e.unit, edges);
          const int idx = g2.index_of(e.unit);
          s.P.insert(s.P.begin() + idx, p0);
          s.z.insert(s.z.begin() + idx, 0.0);
          s.v.insert(s.v.begin() + idx, 0.0);
          s.active.insert(s.active.begin() + idx, e.unit);
          g = std::move(g2);
        }
        traj.event_log.push_back({tb, describe(e)});
      }

      if (distributed && params.load_mode == LoadMode::SingleBus && g.index_of(current_r) < 0) {
        current_r = g.ids.front();
        traj.event_log.push_back(
            {tb, "load-informed unit reassigned to " + std::to_string(current_r)});
      }

      ctx.graph = std::move(g);
      ctx.rebuild(master_fleet, opts.load_shares, current_r);
      pack(s);
      buffers.resize(static_cast<int>(y.size()));
      note_epoch(tb);
      record(tb);  // post-event sample at the same time
      check_v_drift();
    }
  }

  traj.final_state = unpack();
  traj.final_time = opts.T;
  return traj;
}

EnvelopeReport mismatch_envelope_check(const Trajectory& traj, const MismatchModel& model,
                                       const AlgorithmParams& params, double t0, double t1,
                                       double P_l) {
  EnvelopeReport rep;
  rep.t0 = t0;
  rep.t1 = t1;

  auto x_norm = [&](int row) {
    double zsum = 0.0;
    for (double zi : traj.z[row])
      if (!std::isnan(zi)) zsum += zi;
    const double x1 = traj.mismatch[row];
    const double x2 = params.nu1 * zsum;
    return std::hypot(x1, x2);
  };

  int first = -1;
  for (size_t r = 0; r < traj.t.size(); ++r) {
    if (traj.t[r] < t0 - 1e-9 || traj.t[r] > t1 + 1e-9) continue;
    if (first < 0) first = static_cast<int>(r);
  }
  if (first < 0) throw std::invalid_argument("envelope: no samples in segment");

  rep.x0_norm = x_norm(first);
  const double tiny = 1e-12 * std::max(1.0, std::abs(P_l));
  const double tref = traj.t[first];
  for (size_t r = first; r < traj.t.size(); ++r) {
    if (traj.t[r] > t1 + 1e-9) break;
    ++rep.samples;
    const double nx = x_norm(static_cast<int>(r));
    if (rep.x0_norm <= tiny) {
      // Degenerate zero start: the trajectory must stay at zero mismatch.
      rep.max_ratio = std::max(rep.max_ratio, nx > tiny ? 2.0 : 0.0);
      continue;
    }
    const double envelope =
        model.c1 * std::exp(-model.c2 * (traj.t[r] - tref)) * rep.x0_norm;
    rep.max_ratio = std::max(rep.max_ratio, nx / envelope);
  }
  rep.pass = rep.max_ratio <= 1.0 + 1e-3;
  return rep;
}

std::vector<Segment> constant_segments(const LoadSignal& load, const EventSchedule& events,
                                       double T) {
  std::vector<Segment> out;
  const std::vector<double> etimes = events.times();
  for (const auto& [a, b] : load.constant_intervals(T)) {
    std::vector<double> cuts{a};
    for (double te : etimes)
      if (te > a && te < b) cuts.push_back(te);
    cuts.push_back(b);
    for (size_t k = 0; k + 1 < cuts.size(); ++k) {
      if (cuts[k + 1] - cuts[k] <= 1e-9) continue;
      out.push_back({cuts[k], cuts[k + 1], load.at(0.5 * (cuts[k] + cuts[k + 1])).p});
    }
  }
  return out;
}

}  // namespace disped
