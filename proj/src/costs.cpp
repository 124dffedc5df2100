#include "disped/costs.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "disped/kernels.hpp"

namespace disped {

GeneratorFleet::GeneratorFleet(std::vector<GeneratorUnit> units) : units_(std::move(units)) {
  const int n = static_cast<int>(units_.size());
  b_.resize(n);
  c_.resize(n);
  pmin_.resize(n);
  pmax_.resize(n);
  for (int k = 0; k < n; ++k) {
    const GeneratorUnit& u = units_[k];
    if (u.c < 0.0) throw std::invalid_argument("fleet: c must be >= 0 (convexity)");
    if (u.pmin > u.pmax) throw std::invalid_argument("fleet: pmin must be <= pmax");
    b_[k] = u.b;
    c_[k] = u.c;
    pmin_[k] = u.pmin;
    pmax_[k] = u.pmax;
    sum_pmin_ += u.pmin;
    sum_pmax_ += u.pmax;
  }
}

GeneratorFleet GeneratorFleet::subset(std::span<const int> positions) const {
  std::vector<GeneratorUnit> picked;
  picked.reserve(positions.size());
  for (int k : positions) picked.push_back(units_.at(k));
  return GeneratorFleet(std::move(picked));
}

double cost_value(const GeneratorFleet& fleet, std::span<const double> P) {
  if (static_cast<int>(P.size()) != fleet.size())
    throw std::invalid_argument("cost_value: allocation length does not match fleet size");
  double s = 0.0;
  for (int k = 0; k < fleet.size(); ++k) {
    const GeneratorUnit& u = fleet.unit(k);
    s += u.a + u.b * P[k] + u.c * P[k] * P[k];
  }
  return s;
}

PenaltyCost::PenaltyCost(GeneratorFleet f, double eps) : fleet(std::move(f)), epsilon(eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("penalty: epsilon must be > 0");
}

double penalty_value(const PenaltyCost& pc, std::span<const double> P) {
  if (static_cast<int>(P.size()) != pc.fleet.size())
    throw std::invalid_argument("penalty_value: allocation length does not match fleet size");
  double violation = 0.0;
  for (int k = 0; k < pc.fleet.size(); ++k) {
    const GeneratorUnit& u = pc.fleet.unit(k);
    violation += std::max(0.0, P[k] - u.pmax) + std::max(0.0, u.pmin - P[k]);
  }
  return cost_value(pc.fleet, P) + violation / pc.epsilon;
}

void penalty_subgradient_selection(const PenaltyCost& pc, std::span<const double> P,
                                   std::span<double> out) {
  const int n = pc.fleet.size();
  if (static_cast<int>(P.size()) != n || static_cast<int>(out.size()) != n)
    throw std::invalid_argument("penalty_subgradient_selection: length mismatch");
  kernels::active().quad_penalty_grad(n, pc.fleet.b(), pc.fleet.c(), pc.fleet.pmin(),
                                      pc.fleet.pmax(), 1.0 / pc.epsilon, P.data(), out.data());
}

std::vector<double> penalty_subgradient_selection(const PenaltyCost& pc,
                                                  std::span<const double> P) {
  std::vector<double> out(P.size());
  penalty_subgradient_selection(pc, P, out);
  return out;
}

std::vector<GradInterval> penalty_subgradient_interval(const PenaltyCost& pc,
                                                       std::span<const double> P) {
  const int n = pc.fleet.size();
  if (static_cast<int>(P.size()) != n)
    throw std::invalid_argument("penalty_subgradient_interval: length mismatch");
  const double inv_eps = 1.0 / pc.epsilon;
  std::vector<GradInterval> out(n);
  for (int k = 0; k < n; ++k) {
    const GeneratorUnit& u = pc.fleet.unit(k);
    const double g = u.b + 2.0 * u.c * P[k];
    if (P[k] < u.pmin)
      out[k] = {g - inv_eps, g - inv_eps};
    else if (P[k] == u.pmin)
      out[k] = {g - inv_eps, g};
    else if (P[k] < u.pmax)
      out[k] = {g, g};
    else if (P[k] == u.pmax)
      out[k] = {g, g + inv_eps};
    else
      out[k] = {g + inv_eps, g + inv_eps};
  }
  return out;
}

double epsilon_bound(const GeneratorFleet& fleet, double P_l) {
  if (fleet.size() == 0) throw std::invalid_argument("epsilon_bound: empty fleet");
  if (!(fleet.sum_pmin() < P_l && P_l < fleet.sum_pmax()))
    throw std::invalid_argument("epsilon_bound: load outside the strict box range");
  double g = 0.0;
  for (int k = 0; k < fleet.size(); ++k) {
    const GeneratorUnit& u = fleet.unit(k);
    g = std::max(g, std::abs(u.b + 2.0 * u.c * u.pmin));
    g = std::max(g, std::abs(u.b + 2.0 * u.c * u.pmax));
  }
  if (g == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (2.0 * g);
}

double penalty_value(std::span<const SmoothUnitCost> units, double eps,
                     std::span<const double> P) {
  if (!(eps > 0.0)) throw std::invalid_argument("penalty: epsilon must be > 0");
  if (units.size() != P.size()) throw std::invalid_argument("penalty_value: length mismatch");
  double s = 0.0;
  for (size_t k = 0; k < units.size(); ++k) {
    s += units[k].value(P[k]);
    s += (std::max(0.0, P[k] - units[k].pmax) + std::max(0.0, units[k].pmin - P[k])) / eps;
  }
  return s;
}

std::vector<double> penalty_subgradient_selection(std::span<const SmoothUnitCost> units,
                                                  double eps, std::span<const double> P) {
  if (!(eps > 0.0)) throw std::invalid_argument("penalty: epsilon must be > 0");
  if (units.size() != P.size())
    throw std::invalid_argument("penalty_subgradient_selection: length mismatch");
  std::vector<double> out(P.size());
  for (size_t k = 0; k < units.size(); ++k) {
    double g = units[k].gradient(P[k]);
    if (P[k] > units[k].pmax) g += 1.0 / eps;
    if (P[k] < units[k].pmin) g -= 1.0 / eps;
    out[k] = g;
  }
  return out;
}

GeneratorFleet fleet_from_json(const nlohmann::json& j) {
  const nlohmann::json& arr = j.is_array() ? j : j.at("units");
  std::vector<GeneratorUnit> units;
  for (const auto& u : arr) {
    units.push_back({u.at("a").get<double>(), u.at("b").get<double>(), u.at("c").get<double>(),
                     u.at("pmin").get<double>(), u.at("pmax").get<double>()});
  }
  return GeneratorFleet(std::move(units));
}

nlohmann::json fleet_to_json(const GeneratorFleet& fleet) {
  nlohmann::json arr = nlohmann::json::array();
  for (const GeneratorUnit& u : fleet.units())
    arr.push_back({{"a", u.a}, {"b", u.b}, {"c", u.c}, {"pmin", u.pmin}, {"pmax", u.pmax}});
  return arr;
}

}  // namespace disped
