#include "disped/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "disped/kernels.hpp"

namespace disped {

void AlgorithmParams::validate() const {
  if (!(alpha > 0.0 && beta > 0.0 && nu1 > 0.0 && nu2 > 0.0))
    throw std::invalid_argument("params: gains alpha, beta, nu1, nu2 must be > 0");
  if (!(epsilon > 0.0)) throw std::invalid_argument("params: epsilon must be > 0");
  if (r <= 0) throw std::invalid_argument("params: r must be a positive unit id");
}

MismatchModel mismatch_model(const AlgorithmParams& params) {
  params.validate();
  const double a = params.alpha;
  const double q = params.nu1 * params.nu2;
  MismatchModel m;
  m.A << 0.0, 1.0, -q, -a;
  const double s = 1.0 / (2.0 * a * q);
  m.R << s * (a * a + q + q * q), s * a, s * a, s * (1.0 + q);

  // Closed-form eigenvalues of the symmetric 2x2 R.
  const double tr = m.R(0, 0) + m.R(1, 1);
  const double det = m.R(0, 0) * m.R(1, 1) - m.R(0, 1) * m.R(1, 0);
  const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
  const double lmax = 0.5 * (tr + disc);
  const double lmin = 0.5 * (tr - disc);
  if (!(lmin > 0.0)) throw std::logic_error("mismatch_model: R not positive definite");
  m.c1 = std::sqrt(lmax / lmin);
  m.c2 = 1.0 / (2.0 * lmax);
  return m;
}

ConditionReport check_param_condition(const LaplacianBundle& bundle,
                                      const AlgorithmParams& params) {
  params.validate();
  if (!bundle.is_strongly_connected || !bundle.is_weight_balanced || bundle.lambda2_sym <= 0.0)
    throw std::invalid_argument(
        "check_param_condition: digraph must be strongly connected and weight-balanced");
  const double l2 = bundle.lambda2_sym;
  ConditionReport rep;
  rep.lhs = params.nu1 / (params.beta * params.nu2 * l2) +
            params.nu2 * params.nu2 * bundle.lambda_max_ltl / (2.0 * params.alpha);
  rep.rhs = l2;
  rep.ok = rep.lhs < rep.rhs;
  return rep;
}

ConditionReport check_param_condition_distributed(const GraphBounds& b,
                                                  const AlgorithmParams& params) {
  params.validate();
  if (b.n_max <= 0 || b.a_min <= 0.0 || b.d_max_out < 0.0)
    throw std::invalid_argument("check_param_condition_distributed: bounds must be positive");
  const double n2 = static_cast<double>(b.n_max) * b.n_max;
  ConditionReport rep;
  rep.lhs = params.nu1 * n2 / (4.0 * b.a_min * params.beta * params.nu2) +
            2.0 * params.nu2 * params.nu2 * b.n_max * b.d_max_out * b.d_max_out / params.alpha;
  rep.rhs = 4.0 * b.a_min / n2;
  rep.ok = rep.lhs < rep.rhs;
  return rep;
}

double ultimate_bound(const AlgorithmParams& params, double d1, double d2) {
  if (d1 < 0.0 || d2 < 0.0) throw std::invalid_argument("ultimate_bound: d1, d2 must be >= 0");
  const MismatchModel m = mismatch_model(params);
  return (m.c1 / m.c2) * (params.alpha * d1 + d2);
}

double t_rho(const AlgorithmParams& params, double M1, double M2, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("t_rho: rho must be > 0");
  if (M1 < 0.0 || M2 < 0.0) throw std::invalid_argument("t_rho: M1, M2 must be >= 0");
  const MismatchModel m = mismatch_model(params);
  const double arg = m.c1 * (M1 + params.nu1 * M2) / rho;
  if (arg <= 1.0) return 0.0;
  return std::log(arg) / m.c2;
}

void FieldWorkspace::resize(int n) {
  sel.resize(n);
  lmul.resize(n);
}

void centralized_field(const Eigen::MatrixXd& L, const PenaltyCost& pc, double P_l,
                       std::span<const double> P, std::span<double> dP, FieldWorkspace& ws) {
  const int n = pc.fleet.size();
  if (L.rows() != n || static_cast<int>(P.size()) != n || static_cast<int>(dP.size()) != n)
    throw std::invalid_argument("centralized_field: dimension mismatch");
  ws.resize(n);
  const auto& k = kernels::active();
  penalty_subgradient_selection(pc, P, ws.sel);
  k.matvec(n, L.data(), ws.sel.data(), ws.lmul.data());
  const double feedback = (P_l - k.sum(n, P.data())) / n;
  for (int i = 0; i < n; ++i) dP[i] = -ws.lmul[i] + feedback;
}

void distributed_field(const Eigen::MatrixXd& L, const PenaltyCost& pc,
                       const AlgorithmParams& params, std::span<const double> drive,
                       std::span<const double> P, std::span<const double> z,
                       std::span<const double> v, std::span<double> dP, std::span<double> dz,
                       std::span<double> dv, FieldWorkspace& ws) {
  const int n = pc.fleet.size();
  if (L.rows() != n || static_cast<int>(P.size()) != n || static_cast<int>(z.size()) != n ||
      static_cast<int>(v.size()) != n || static_cast<int>(drive.size()) != n)
    throw std::invalid_argument("distributed_field: dimension mismatch");
  ws.resize(n);
  const auto& k = kernels::active();

  penalty_subgradient_selection(pc, P, ws.sel);
  k.matvec(n, L.data(), ws.sel.data(), dP.data());  // dP = L sel for now
  for (int i = 0; i < n; ++i) dP[i] = -dP[i] + params.nu1 * z[i];

  k.matvec(n, L.data(), z.data(), ws.lmul.data());  // lmul = L z
  for (int i = 0; i < n; ++i)
    dz[i] = -params.alpha * z[i] - params.beta * ws.lmul[i] - v[i] +
            params.nu2 * (drive[i] - P[i]);

  const double ab = params.alpha * params.beta;
  for (int i = 0; i < n; ++i) dv[i] = ab * ws.lmul[i];
  // Weight balance makes sum(dv) = 0 exactly in real arithmetic; remove the
  // column-sum rounding bias so the invariant holds over long runs.
  const double bias = k.sum(n, dv.data()) / n;
  for (int i = 0; i < n; ++i) dv[i] -= bias;
}

}  // namespace disped
