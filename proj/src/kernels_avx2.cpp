// AVX2+FMA kernel variants. This translation unit is built with -mavx2 -mfma;
// the dispatcher only hands out the table when the CPU reports both features.

#include "disped/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace disped::kernels::avx2 {
namespace {

void matvec(int n, const double* a, const double* x, double* y) {
  int i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, _mm256_setzero_pd());
  for (; i < n; ++i) y[i] = 0.0;
  for (int j = 0; j < n; ++j) {
    const __m256d xj = _mm256_set1_pd(x[j]);
    const double* col = a + static_cast<long>(j) * n;
    int k = 0;
    for (; k + 4 <= n; k += 4) {
      __m256d acc = _mm256_loadu_pd(y + k);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(col + k), xj, acc);
      _mm256_storeu_pd(y + k, acc);
    }
    for (; k < n; ++k) y[k] += col[k] * x[j];
  }
}

void axpy(int n, double alpha, const double* x, double* y) {
  const __m256d va = _mm256_set1_pd(alpha);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_loadu_pd(y + i);
    acc = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), acc);
    _mm256_storeu_pd(y + i, acc);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void add_scaled(int n, const double* base, double alpha, const double* k, double* out) {
  const __m256d va = _mm256_set1_pd(alpha);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(k + i), _mm256_loadu_pd(base + i));
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) out[i] = base[i] + alpha * k[i];
}

void rk4_combine(int n, const double* base, double h6, const double* k1, const double* k2,
                 const double* k3, const double* k4, double* out) {
  const __m256d vh = _mm256_set1_pd(h6);
  const __m256d two = _mm256_set1_pd(2.0);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d s = _mm256_loadu_pd(k1 + i);
    s = _mm256_fmadd_pd(two, _mm256_loadu_pd(k2 + i), s);
    s = _mm256_fmadd_pd(two, _mm256_loadu_pd(k3 + i), s);
    s = _mm256_add_pd(s, _mm256_loadu_pd(k4 + i));
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(vh, s, _mm256_loadu_pd(base + i)));
  }
  for (; i < n; ++i)
    out[i] = base[i] + h6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

double reduce4(__m256d v) {
  // Fixed lane order keeps the reduction deterministic.
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot(int n, const double* x, const double* y) {
  __m256d acc = _mm256_setzero_pd();
  int i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  double s = reduce4(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double sum(int n, const double* x) {
  __m256d acc = _mm256_setzero_pd();
  int i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double s = reduce4(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

void quad_penalty_grad(int n, const double* b, const double* c, const double* lo,
                       const double* hi, double inv_eps, const double* p, double* out) {
  const __m256d veps = _mm256_set1_pd(inv_eps);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vp = _mm256_loadu_pd(p + i);
    const __m256d vc2 = _mm256_add_pd(_mm256_loadu_pd(c + i), _mm256_loadu_pd(c + i));
    __m256d g = _mm256_fmadd_pd(vc2, vp, _mm256_loadu_pd(b + i));
    const __m256d above = _mm256_cmp_pd(vp, _mm256_loadu_pd(hi + i), _CMP_GT_OQ);
    const __m256d below = _mm256_cmp_pd(vp, _mm256_loadu_pd(lo + i), _CMP_LT_OQ);
    g = _mm256_add_pd(g, _mm256_and_pd(above, veps));
    g = _mm256_sub_pd(g, _mm256_and_pd(below, veps));
    _mm256_storeu_pd(out + i, g);
  }
  for (; i < n; ++i) {
    double g = b[i] + 2.0 * c[i] * p[i];
    if (p[i] > hi[i]) g += inv_eps;
    if (p[i] < lo[i]) g -= inv_eps;
    out[i] = g;
  }
}

const Table kTable = {
    "avx2", matvec, axpy, add_scaled, rk4_combine, dot, sum, quad_penalty_grad,
};

}  // namespace

const Table* table() { return &kTable; }

}  // namespace disped::kernels::avx2

#else

namespace disped::kernels::avx2 {
const Table* table() { return nullptr; }
}  // namespace disped::kernels::avx2

#endif
