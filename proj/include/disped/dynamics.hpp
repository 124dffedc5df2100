#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "disped/costs.hpp"
#include "disped/graph.hpp"

namespace disped {

enum class LoadMode { SingleBus, DistributedBus };

/// Gains of the coordination dynamics plus the penalty weight, the identity
/// of the load-informed unit r, and how the load enters the estimator drive.
struct AlgorithmParams {
  double alpha = 0.0;
  double beta = 0.0;
  double nu1 = 0.0;
  double nu2 = 0.0;
  double epsilon = 0.0;
  int r = 1;  // unit id that knows the total load (single-bus mode)
  LoadMode load_mode = LoadMode::SingleBus;

  void validate() const;  // throws unless all gains and epsilon are > 0
};

/// Network state: allocation P, mismatch estimate z, auxiliary consensus
/// state v, and the ids of the currently active units (sorted).
struct SimState {
  std::vector<double> P;
  std::vector<double> z;
  std::vector<double> v;
  std::vector<int> active;
};

/// Two-state linear model of the aggregate mismatch (x1 = sum(P) - P_l,
/// x2 = nu1 sum(z)) with its Lyapunov certificate and explicit rate
/// constants: |x(t)| <= c1 exp(-c2 t) |x(0)|.
struct MismatchModel {
  Eigen::Matrix2d A;
  Eigen::Matrix2d R;  // positive definite, A^T R + R A = -I
  double c1 = 0.0;    // sqrt(lmax(R) / lmin(R))
  double c2 = 0.0;    // 1 / (2 lmax(R))
};

MismatchModel mismatch_model(const AlgorithmParams& params);

struct ConditionReport {
  bool ok = false;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Spectral gain condition nu1/(beta nu2 l2) + nu2^2 lmax(L^T L)/(2 alpha) < l2.
/// Sufficient for convergence, not necessary. Throws when the bundle is not
/// strongly connected and weight-balanced (l2 <= 0).
ConditionReport check_param_condition(const LaplacianBundle& bundle,
                                      const AlgorithmParams& params);

/// Distributed surrogate using only the consensus-verifiable bounds; ok here
/// implies the spectral condition holds.
ConditionReport check_param_condition_distributed(const GraphBounds& b,
                                                  const AlgorithmParams& params);

/// Ultimate bound (c1/c2)(alpha d1 + d2) on the mismatch while tracking a
/// load with |dP_l| <= d1 and |ddP_l| <= d2.
double ultimate_bound(const AlgorithmParams& params, double d1, double d2);

/// Time for the mismatch to drop below rho after a disturbance bounded by
/// M1 (power mismatch) and M2 (estimate sum); clamped at zero.
double t_rho(const AlgorithmParams& params, double M1, double M2, double rho);

/// Scratch buffers so repeated field evaluations never allocate.
struct FieldWorkspace {
  std::vector<double> sel;   // subgradient selection
  std::vector<double> lmul;  // Laplacian products
  void resize(int n);
};

/// Centralized flow: dP = -L sel + (1/n)(P_l - sum P) 1.
void centralized_field(const Eigen::MatrixXd& L, const PenaltyCost& pc, double P_l,
                       std::span<const double> P, std::span<double> dP, FieldWorkspace& ws);

/// Distributed flow over the active units:
///   dP = -L sel + nu1 z
///   dz = -alpha z - beta L z - v + nu2 (drive - P)
///   dv = alpha beta L z        (projected onto H_0)
/// `drive` is P_l e_r in single-bus mode or the per-bus load vector.
/// dv is mean-corrected so the exact invariant d(sum v)/dt = 0 of
/// weight-balanced digraphs survives floating-point assembly.
void distributed_field(const Eigen::MatrixXd& L, const PenaltyCost& pc,
                       const AlgorithmParams& params, std::span<const double> drive,
                       std::span<const double> P, std::span<const double> z,
                       std::span<const double> v, std::span<double> dP, std::span<double> dz,
                       std::span<double> dv, FieldWorkspace& ws);

}  // namespace disped
