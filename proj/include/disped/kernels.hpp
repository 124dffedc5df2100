#pragma once

// Data-parallel inner-loop kernels used by the integrator and the cost model.
// Every kernel has a scalar reference implementation and may have SIMD
// variants; the active table is chosen once at runtime from CPU capabilities
// (override with DISPED_KERNELS=scalar|avx2 or select()).

namespace disped::kernels {

enum class Isa { Scalar, Avx2 };

struct Table {
  const char* name;

  // y = A * x with A column-major n-by-n, leading dimension n.
  void (*matvec)(int n, const double* a, const double* x, double* y);

  // y += alpha * x
  void (*axpy)(int n, double alpha, const double* x, double* y);

  // out = base + alpha * k   (base, k, out may not alias each other except out==base)
  void (*add_scaled)(int n, const double* base, double alpha, const double* k, double* out);

  // out = base + h6 * (k1 + 2 k2 + 2 k3 + k4)
  void (*rk4_combine)(int n, const double* base, double h6, const double* k1,
                      const double* k2, const double* k3, const double* k4, double* out);

  double (*dot)(int n, const double* x, const double* y);
  double (*sum)(int n, const double* x);

  // out_i = b_i + 2 c_i p_i + inv_eps * [p_i > hi_i] - inv_eps * [p_i < lo_i]
  // Exact boundary hits take the interior branch (no penalty term).
  void (*quad_penalty_grad)(int n, const double* b, const double* c, const double* lo,
                            const double* hi, double inv_eps, const double* p, double* out);
};

/// Best ISA the current CPU (and build) supports.
Isa best_supported();

/// Kernel table for a specific ISA; throws if that ISA is unavailable here.
const Table& table_for(Isa isa);

/// Process-wide active table. First use honours DISPED_KERNELS.
const Table& active();

/// Force a specific ISA (tests, CLI flag). Throws if unavailable.
void select(Isa isa);

const char* isa_name(Isa isa);

namespace scalar {
void matvec(int n, const double* a, const double* x, double* y);
void axpy(int n, double alpha, const double* x, double* y);
void add_scaled(int n, const double* base, double alpha, const double* k, double* out);
void rk4_combine(int n, const double* base, double h6, const double* k1, const double* k2,
                 const double* k3, const double* k4, double* out);
double dot(int n, const double* x, const double* y);
double sum(int n, const double* x);
void quad_penalty_grad(int n, const double* b, const double* c, const double* lo,
                       const double* hi, double inv_eps, const double* p, double* out);
}  // namespace scalar

namespace avx2 {
/// Null when the build or CPU lacks AVX2+FMA.
const Table* table();
}  // namespace avx2

}  // namespace disped::kernels
