#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "disped/costs.hpp"

namespace disped {

/// Dispatch instance: minimize total cost subject to sum(P) = load and the
/// per-unit boxes. The load must lie strictly inside (sum pmin, sum pmax).
struct DispatchProblem {
  GeneratorFleet fleet;
  double load = 0.0;

  void validate() const;
};

struct DispatchSolution {
  std::vector<double> p;  // optimal allocation
  double mu = 0.0;        // marginal price (common multiplier)
  double cost = 0.0;
};

/// Classical bisection on the marginal price with clamped unit responses.
/// Independent of the gradient-flow dynamics by design: this is the ground
/// truth the trajectories are tested against. Flat-cost ties (c = 0 with
/// equal b) are resolved by allocating the residual load proportionally to
/// box widths. Default tol is 1e-9 * max(1, load).
DispatchSolution solve_lambda_iteration(const DispatchProblem& p, double tol = -1.0);

struct KktReport {
  bool ok = false;
  std::optional<double> mu_witness;
  double power_residual = 0.0;  // |sum P - load|
  double interval_gap = 0.0;    // how far the gradient intervals miss a common point
  std::string detail;
};

/// Certifies optimality: the power balance holds within tol and the per-unit
/// generalized-gradient intervals (widened by tol) share a common multiplier.
KktReport kkt_check(const DispatchProblem& p, std::span<const double> P, double epsilon,
                    double tol);

/// Euclidean distance from P to the optimal set. Unique optimum when every
/// c_i > 0; otherwise the flat-tied units form a box-capped simplex that the
/// query is projected onto.
double distance_to_solution_set(const DispatchProblem& p, std::span<const double> P);

}  // namespace disped
