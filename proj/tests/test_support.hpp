#pragma once

// Shared helpers for the unit and acceptance suites: deterministic random
// instances, independent oracles (active-set enumeration, power iteration),
// a gain tuner, and stall-driven integration.

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "disped/dynamics.hpp"
#include "disped/graph.hpp"
#include "disped/oracle.hpp"
#include "disped/simulator.hpp"

namespace disped::testing {

// ---------------------------------------------------------------- generators

/// Directed cycle with one shared weight (balanced by construction) plus
/// random bidirectional chords: strongly connected and weight-balanced.
inline WeightedDigraph random_balanced_digraph(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> wdist(0.5, 1.5);
  std::bernoulli_distribution chord(0.35);
  WeightedDigraph g;
  for (int i = 1; i <= n; ++i) g.ids.push_back(i);
  const double w0 = wdist(rng);
  for (int i = 1; i <= n; ++i) g.edges.push_back({i, i % n + 1, w0});
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      if (j == i + 1 || (i == 1 && j == n)) continue;  // cycle already links them
      if (!chord(rng)) continue;
      const double w = wdist(rng);
      g.edges.push_back({i, j, w});
      g.edges.push_back({j, i, w});
    }
  return g;
}

struct RandomProblem {
  DispatchProblem problem{GeneratorFleet{}, 0.0};
  WeightedDigraph graph;
  double mu_star = 0.0;
  std::vector<double> p_star;
  double epsilon = 0.0;
};

/// Strictly convex dispatch instance whose optimum is strictly interior to
/// every box (margin >= 0.5), so the penalty kinks are inactive at the
/// solution and fixed-step integration can reach tight tolerances.
inline RandomProblem random_interior_problem(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> bdist(1.0, 3.0);
  std::uniform_real_distribution<double> cdist(0.5, 2.0);
  std::uniform_real_distribution<double> adist(0.0, 5.0);

  RandomProblem out;
  std::vector<GeneratorUnit> units(n);
  double mu_lo = 0.0;
  for (auto& u : units) {
    u = {adist(rng), bdist(rng), cdist(rng), 0.0, 12.0};
    mu_lo = std::max(mu_lo, u.b + 2.0 * u.c * (u.pmin + 0.5));
  }
  std::uniform_real_distribution<double> mudist(mu_lo + 0.5, 12.0);
  out.mu_star = mudist(rng);

  double load = 0.0;
  for (const auto& u : units) {
    const double p = (out.mu_star - u.b) / (2.0 * u.c);
    out.p_star.push_back(p);
    load += p;
  }
  out.problem = {GeneratorFleet(std::move(units)), load};
  out.epsilon = 0.5 * epsilon_bound(out.problem.fleet, load);
  out.graph = random_balanced_digraph(rng, n);
  return out;
}

/// Random strictly convex instance with no interiority guarantee (box-active
/// optima likely); used where the oracle itself is under test.
inline DispatchProblem random_boxed_problem(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> bdist(0.0, 6.0);
  std::uniform_real_distribution<double> cdist(0.2, 2.0);
  std::uniform_real_distribution<double> pdist(0.0, 2.0);
  std::uniform_real_distribution<double> wdist(1.0, 5.0);
  std::vector<GeneratorUnit> units(n);
  for (auto& u : units) {
    const double lo = pdist(rng);
    u = {0.0, bdist(rng), cdist(rng), lo, lo + wdist(rng)};
  }
  GeneratorFleet fleet(std::move(units));
  std::uniform_real_distribution<double> frac(0.1, 0.9);
  const double load = fleet.sum_pmin() + frac(rng) * (fleet.sum_pmax() - fleet.sum_pmin());
  return {std::move(fleet), load};
}

// ------------------------------------------------------------------- oracles

/// Exact minimizer by enumerating all 3^n {low, interior, high} assignments
/// (strictly convex units only). Independent of the bisection route.
inline DispatchSolution enumeration_oracle(const DispatchProblem& p) {
  const int n = p.fleet.size();
  if (n > 12) throw std::invalid_argument("enumeration oracle: n too large");
  const double tol = 1e-9 * std::max(1.0, std::abs(p.load));

  DispatchSolution best;
  best.cost = std::numeric_limits<double>::infinity();
  std::vector<int> assign(n, 0);  // 0 = low, 1 = interior, 2 = high
  long total = 1;
  for (int k = 0; k < n; ++k) total *= 3;

  for (long code = 0; code < total; ++code) {
    long c = code;
    double fixed = 0.0;
    double inv_curv = 0.0, b_over = 0.0;
    bool usable = true;
    for (int k = 0; k < n; ++k) {
      assign[k] = static_cast<int>(c % 3);
      c /= 3;
      const GeneratorUnit& u = p.fleet.unit(k);
      if (assign[k] == 0) fixed += u.pmin;
      if (assign[k] == 2) fixed += u.pmax;
      if (assign[k] == 1) {
        if (u.c <= 0.0) {
          usable = false;
          break;
        }
        inv_curv += 1.0 / (2.0 * u.c);
        b_over += u.b / (2.0 * u.c);
      }
    }
    if (!usable) continue;

    std::vector<double> P(n);
    double mu = 0.0;
    if (inv_curv == 0.0) {
      if (std::abs(fixed - p.load) > tol) continue;
    } else {
      mu = (p.load - fixed + b_over) / inv_curv;
    }
    bool feasible = true;
    for (int k = 0; k < n; ++k) {
      const GeneratorUnit& u = p.fleet.unit(k);
      if (assign[k] == 0) P[k] = u.pmin;
      if (assign[k] == 2) P[k] = u.pmax;
      if (assign[k] == 1) {
        P[k] = (mu - u.b) / (2.0 * u.c);
        if (P[k] < u.pmin - tol || P[k] > u.pmax + tol) {
          feasible = false;
          break;
        }
      }
    }
    if (!feasible) continue;
    const double cost = cost_value(p.fleet, P);
    if (cost < best.cost) {
      best.cost = cost;
      best.p = P;
      best.mu = mu;
    }
  }
  if (!std::isfinite(best.cost)) throw std::logic_error("enumeration oracle: nothing feasible");
  return best;
}

/// Largest eigenvalue of a symmetric PSD matrix by plain power iteration.
inline double power_lambda_max(const Eigen::MatrixXd& S, int iters = 4000) {
  const int n = static_cast<int>(S.rows());
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = std::sin(i + 1.0) + 1.5;
  x.normalize();
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    Eigen::VectorXd y = S * x;
    lambda = x.dot(y);
    const double norm = y.norm();
    if (norm == 0.0) return 0.0;
    x = y / norm;
  }
  return lambda;
}

/// Smallest non-zero eigenvalue of a symmetric Laplacian-like matrix whose
/// kernel is spanned by the all-ones vector: power iteration on the shifted
/// complement restricted to that subspace.
inline double power_lambda2_sym(const Eigen::MatrixXd& S, int iters = 6000) {
  const int n = static_cast<int>(S.rows());
  const double shift = power_lambda_max(S) + 1.0;
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = std::cos(2.0 * i + 1.0);
  x.array() -= x.mean();
  x.normalize();
  double rayleigh = 0.0;
  for (int it = 0; it < iters; ++it) {
    Eigen::VectorXd y = shift * x - S * x;
    y.array() -= y.mean();
    rayleigh = x.dot(y);
    const double norm = y.norm();
    if (norm == 0.0) break;
    x = y / norm;
  }
  return shift - rayleigh;
}

// --------------------------------------------------------------- gain tuning

/// Gains satisfying the spectral condition with a healthy margin and a
/// mismatch mode fast enough for short runs.
inline AlgorithmParams tune_gains(const LaplacianBundle& bundle, double epsilon, int r) {
  const double l2 = bundle.lambda2_sym;
  const double lM = std::max(bundle.lambda_max_ltl, 1e-12);
  AlgorithmParams p;
  p.nu1 = 1.0;
  p.epsilon = epsilon;
  p.r = r;
  double alpha = 10.0;
  for (int it = 0; it < 80; ++it) {
    const double nu2 = std::clamp(0.7 * std::sqrt(alpha * l2 / lM), 0.3, 2.0);
    // Keep the mismatch dynamics near critical damping, then re-verify.
    const double q = p.nu1 * nu2;
    const double alpha_fast = std::clamp(2.5 * std::sqrt(q), 2.0, alpha);
    p.alpha = alpha_fast;
    p.nu2 = std::clamp(0.7 * std::sqrt(p.alpha * l2 / lM), 0.3, 2.0);
    p.beta = 8.0 * p.nu1 / (p.nu2 * l2 * l2);
    if (check_param_condition(bundle, p).ok) return p;
    alpha *= 1.6;
    p.alpha = alpha;
  }
  throw std::runtime_error("tune_gains: no admissible gains found");
}

/// Conservative explicit-RK step for the tuned gains on this topology.
inline double stable_dt(const AlgorithmParams& p, const LaplacianBundle& bundle) {
  const double lap_norm = std::sqrt(std::max(bundle.lambda_max_ltl, 0.0));
  const double stiff = p.alpha + p.beta * lap_norm + p.nu1 + p.nu2;
  return std::min(5e-3, 1.5 / stiff);
}

// ------------------------------------------------------- stall-driven runs

struct StallRun {
  SimState state;
  double T = 0.0;       // total simulated time
  double dt = 0.0;
  bool stalled = false;
};

/// Integrates a constant-load scenario in chunks until the mismatch and the
/// allocation stop moving (or Tmax is hit).
inline StallRun integrate_until_stall(const GeneratorFleet& fleet, const AlgorithmParams& params,
                                      const WeightedDigraph& g, double P_l, SimState init,
                                      double dt, double chunk = 5.0, double Tmax = 600.0) {
  StallRun run;
  run.state = std::move(init);
  run.dt = dt;
  const LoadSignal load = LoadSignal::constant(P_l);
  const EventSchedule no_events;
  IntegrateOptions opts;
  opts.dt = dt;
  opts.T = chunk;
  opts.record_every = 1 << 30;  // boundaries only
  while (run.T < Tmax) {
    const Trajectory traj =
        integrate(fleet, params, g, load, no_events, run.state, opts);
    run.T += chunk;
    double dp = 0.0, pmax = 1.0;
    for (size_t k = 0; k < run.state.P.size(); ++k) {
      dp = std::max(dp, std::abs(traj.final_state.P[k] - run.state.P[k]));
      pmax = std::max(pmax, std::abs(run.state.P[k]));
    }
    run.state = traj.final_state;
    const bool mismatch_done = std::abs(traj.mismatch.back()) <= 1e-8 * std::max(1.0, P_l);
    if (mismatch_done && dp <= 1e-9 * pmax) {
      run.stalled = true;
      break;
    }
  }
  return run;
}

}  // namespace disped::testing
