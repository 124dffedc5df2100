#include "disped/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace disped {

namespace {

double unit_response(const GeneratorUnit& u, double mu) {
  if (u.c > 0.0) return std::clamp((mu - u.b) / (2.0 * u.c), u.pmin, u.pmax);
  // Linear cost: bang-bang response; the tie at mu == b is handled by the caller.
  if (mu < u.b) return u.pmin;
  if (mu > u.b) return u.pmax;
  return u.pmin;
}

double total_response(const GeneratorFleet& fleet, double mu) {
  double s = 0.0;
  for (int k = 0; k < fleet.size(); ++k) s += unit_response(fleet.unit(k), mu);
  return s;
}

// Projection of x onto {l <= y <= u, sum y = r}: y_i = clamp(x_i + tau) with
// the shift found by bisection (the clamped sum is monotone in tau).
std::vector<double> project_box_simplex(std::span<const double> x, std::span<const double> l,
                                        std::span<const double> u, double r) {
  const int n = static_cast<int>(x.size());
  double tlo = 0.0, thi = 0.0;
  for (int k = 0; k < n; ++k) {
    tlo = std::min(tlo, l[k] - x[k]);
    thi = std::max(thi, u[k] - x[k]);
  }
  auto total = [&](double tau) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += std::clamp(x[k] + tau, l[k], u[k]);
    return s;
  };
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (tlo + thi);
    (total(mid) < r ? tlo : thi) = mid;
  }
  const double tau = 0.5 * (tlo + thi);
  std::vector<double> y(n);
  for (int k = 0; k < n; ++k) y[k] = std::clamp(x[k] + tau, l[k], u[k]);
  return y;
}

}  // namespace

void DispatchProblem::validate() const {
  if (fleet.size() == 0) throw std::invalid_argument("dispatch: empty fleet");
  if (!(fleet.sum_pmin() < load && load < fleet.sum_pmax()))
    throw std::invalid_argument("dispatch: load must lie strictly inside (sum pmin, sum pmax)");
}

DispatchSolution solve_lambda_iteration(const DispatchProblem& p, double tol) {
  p.validate();
  const GeneratorFleet& fleet = p.fleet;
  if (tol <= 0.0) tol = 1e-9 * std::max(1.0, p.load);

  // Box-corner gradients bracket the multiplier; widen by one unit to guard rounding.
  double mu_lo = fleet.unit(0).b + 2.0 * fleet.unit(0).c * fleet.unit(0).pmin;
  double mu_hi = mu_lo;
  for (int k = 0; k < fleet.size(); ++k) {
    const GeneratorUnit& u = fleet.unit(k);
    mu_lo = std::min(mu_lo, u.b + 2.0 * u.c * u.pmin);
    mu_hi = std::max(mu_hi, u.b + 2.0 * u.c * u.pmax);
  }
  mu_lo -= 1.0;
  mu_hi += 1.0;

  DispatchSolution sol;
  double mu = 0.5 * (mu_lo + mu_hi);
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    mu = 0.5 * (mu_lo + mu_hi);
    const double total = total_response(fleet, mu);
    if (std::abs(total - p.load) <= tol) {
      converged = true;
      break;
    }
    (total < p.load ? mu_lo : mu_hi) = mu;
  }

  sol.mu = mu;
  sol.p.resize(fleet.size());
  for (int k = 0; k < fleet.size(); ++k) sol.p[k] = unit_response(fleet.unit(k), mu);

  if (!converged) {
    // The response jumped across the load: linear units tied at mu absorb the
    // residual, split proportionally to their box widths.
    const double tie_tol = 1e-9 * std::max(1.0, std::abs(mu));
    double width = 0.0;
    for (int k = 0; k < fleet.size(); ++k) {
      const GeneratorUnit& u = fleet.unit(k);
      if (u.c == 0.0 && std::abs(u.b - mu) <= tie_tol) width += u.pmax - u.pmin;
    }
    double residual = p.load;
    for (int k = 0; k < fleet.size(); ++k) residual -= sol.p[k];
    if (width <= 0.0 || residual < -tol || residual > width + tol)
      throw std::runtime_error("solve_lambda_iteration: no convergence in 200 bisection steps");
    for (int k = 0; k < fleet.size(); ++k) {
      const GeneratorUnit& u = fleet.unit(k);
      if (u.c == 0.0 && std::abs(u.b - mu) <= tie_tol)
        sol.p[k] = u.pmin + residual * (u.pmax - u.pmin) / width;
    }
  }

  sol.cost = cost_value(fleet, sol.p);
  return sol;
}

KktReport kkt_check(const DispatchProblem& p, std::span<const double> P, double epsilon,
                    double tol) {
  KktReport rep;
  PenaltyCost pc(p.fleet, epsilon);
  const auto intervals = penalty_subgradient_interval(pc, P);

  double total = 0.0;
  for (double v : P) total += v;
  rep.power_residual = std::abs(total - p.load);

  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const GradInterval& iv : intervals) {
    lo = std::max(lo, iv.lo - tol);
    hi = std::min(hi, iv.hi + tol);
  }
  rep.interval_gap = std::max(0.0, lo - hi);

  const bool balance_ok = rep.power_residual <= tol;
  const bool interval_ok = lo <= hi;
  rep.ok = balance_ok && interval_ok;
  if (interval_ok) rep.mu_witness = 0.5 * (lo + hi);
  if (!balance_ok)
    rep.detail += "power balance residual " + std::to_string(rep.power_residual) +
                  " exceeds tol " + std::to_string(tol) + "; ";
  if (!interval_ok)
    rep.detail += "gradient intervals disjoint (gap " + std::to_string(rep.interval_gap) + "); ";
  if (rep.ok) rep.detail = "ok";
  return rep;
}

double distance_to_solution_set(const DispatchProblem& p, std::span<const double> P) {
  if (static_cast<int>(P.size()) != p.fleet.size())
    throw std::invalid_argument("distance_to_solution_set: length mismatch");
  const DispatchSolution sol = solve_lambda_iteration(p);

  const double tie_tol = 1e-9 * std::max(1.0, std::abs(sol.mu));
  std::vector<int> tied;
  for (int k = 0; k < p.fleet.size(); ++k) {
    const GeneratorUnit& u = p.fleet.unit(k);
    if (u.c == 0.0 && std::abs(u.b - sol.mu) <= tie_tol) tied.push_back(k);
  }

  if (tied.empty()) {
    double d2 = 0.0;
    for (int k = 0; k < p.fleet.size(); ++k) d2 += (P[k] - sol.p[k]) * (P[k] - sol.p[k]);
    return std::sqrt(d2);
  }

  // Strict units are pinned at their optimal values; the tied units may share
  // their aggregate optimally, so project onto that box-capped simplex.
  double d2 = 0.0;
  double tied_share = p.load;
  for (int k = 0; k < p.fleet.size(); ++k) {
    if (std::find(tied.begin(), tied.end(), k) == tied.end()) {
      d2 += (P[k] - sol.p[k]) * (P[k] - sol.p[k]);
      tied_share -= sol.p[k];
    }
  }
  std::vector<double> x, l, u;
  for (int k : tied) {
    x.push_back(P[k]);
    l.push_back(p.fleet.unit(k).pmin);
    u.push_back(p.fleet.unit(k).pmax);
  }
  const std::vector<double> y = project_box_simplex(x, l, u, tied_share);
  for (size_t k = 0; k < x.size(); ++k) d2 += (x[k] - y[k]) * (x[k] - y[k]);
  return std::sqrt(d2);
}

}  // namespace disped
