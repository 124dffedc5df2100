#pragma once

#include <functional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace disped {

/// One generating unit: quadratic cost a + b P + c P^2 and box limits [MW].
struct GeneratorUnit {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;  // >= 0 for convexity
  double pmin = 0.0;
  double pmax = 0.0;
};

/// Immutable fleet of quadratic-cost units. Keeps struct-of-array copies of
/// the coefficients so the subgradient kernel can run over contiguous data.
class GeneratorFleet {
 public:
  GeneratorFleet() = default;
  explicit GeneratorFleet(std::vector<GeneratorUnit> units);

  int size() const { return static_cast<int>(units_.size()); }
  const GeneratorUnit& unit(int k) const { return units_[k]; }
  const std::vector<GeneratorUnit>& units() const { return units_; }

  const double* b() const { return b_.data(); }
  const double* c() const { return c_.data(); }
  const double* pmin() const { return pmin_.data(); }
  const double* pmax() const { return pmax_.data(); }

  double sum_pmin() const { return sum_pmin_; }
  double sum_pmax() const { return sum_pmax_; }

  /// Fleet restricted to the given unit positions (kept in the given order).
  GeneratorFleet subset(std::span<const int> positions) const;

 private:
  std::vector<GeneratorUnit> units_;
  std::vector<double> b_, c_, pmin_, pmax_;
  double sum_pmin_ = 0.0, sum_pmax_ = 0.0;
};

/// Total generation cost sum_i a_i + b_i P_i + c_i P_i^2.
double cost_value(const GeneratorFleet& fleet, std::span<const double> P);

/// Exact-penalty cost f_eps: the fleet cost plus (1/eps) * box violations.
struct PenaltyCost {
  GeneratorFleet fleet;
  double epsilon;
  PenaltyCost(GeneratorFleet f, double eps);
};

double penalty_value(const PenaltyCost& pc, std::span<const double> P);

/// Single-valued measurable selection of the generalized gradient: the
/// interior gradient value at exact box boundaries, gradient -/+ 1/eps
/// strictly below/above the box.
void penalty_subgradient_selection(const PenaltyCost& pc, std::span<const double> P,
                                   std::span<double> out);
std::vector<double> penalty_subgradient_selection(const PenaltyCost& pc,
                                                  std::span<const double> P);

/// Full generalized-gradient interval per unit; degenerate off the kinks.
struct GradInterval {
  double lo = 0.0;
  double hi = 0.0;
};
std::vector<GradInterval> penalty_subgradient_interval(const PenaltyCost& pc,
                                                       std::span<const double> P);

/// Admissible penalty weight 1 / (2 max_{P in box} |grad f(P)|_inf); the box
/// maximum is a conservative (smaller-epsilon) stand-in for the feasible-set
/// maximum. Returns +inf when the gradient bound is zero. Throws when
/// [sum pmin, sum pmax] does not strictly contain P_l.
double epsilon_bound(const GeneratorFleet& fleet, double P_l);

/// Hook for general convex, continuously differentiable unit costs. Only the
/// quadratic fleet ships with oracle support; these overloads let callers
/// evaluate the penalty machinery on custom models.
struct SmoothUnitCost {
  std::function<double(double)> value;
  std::function<double(double)> gradient;
  double pmin = 0.0;
  double pmax = 0.0;
};
double penalty_value(std::span<const SmoothUnitCost> units, double eps,
                     std::span<const double> P);
std::vector<double> penalty_subgradient_selection(std::span<const SmoothUnitCost> units,
                                                  double eps, std::span<const double> P);

// Fleet file format: a JSON array of {a, b, c, pmin, pmax}, or an object
// {"units": [...]} with optional metadata fields.
GeneratorFleet fleet_from_json(const nlohmann::json& j);
nlohmann::json fleet_to_json(const GeneratorFleet& fleet);

}  // namespace disped
