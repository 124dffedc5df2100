#include "disped/kernels.hpp"

namespace disped::kernels::scalar {

void matvec(int n, const double* a, const double* x, double* y) {
  for (int i = 0; i < n; ++i) y[i] = 0.0;
  for (int j = 0; j < n; ++j) {
    const double xj = x[j];
    const double* col = a + static_cast<long>(j) * n;
    for (int i = 0; i < n; ++i) y[i] += col[i] * xj;
  }
}

void axpy(int n, double alpha, const double* x, double* y) {
  for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void add_scaled(int n, const double* base, double alpha, const double* k, double* out) {
  for (int i = 0; i < n; ++i) out[i] = base[i] + alpha * k[i];
}

void rk4_combine(int n, const double* base, double h6, const double* k1, const double* k2,
                 const double* k3, const double* k4, double* out) {
  for (int i = 0; i < n; ++i)
    out[i] = base[i] + h6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

double dot(int n, const double* x, const double* y) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double sum(int n, const double* x) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += x[i];
  return s;
}

void quad_penalty_grad(int n, const double* b, const double* c, const double* lo,
                       const double* hi, double inv_eps, const double* p, double* out) {
  for (int i = 0; i < n; ++i) {
    double g = b[i] + 2.0 * c[i] * p[i];
    if (p[i] > hi[i]) g += inv_eps;
    if (p[i] < lo[i]) g -= inv_eps;
    out[i] = g;
  }
}

}  // namespace disped::kernels::scalar
