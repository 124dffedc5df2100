#include <doctest.h>

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "disped/kernels.hpp"

using namespace disped;

namespace {

std::vector<double> random_vec(std::mt19937& rng, int n, double lo = -10.0, double hi = 10.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("scalar matvec matches Eigen") {
  std::mt19937 rng(7);
  for (int n : {1, 2, 3, 5, 16, 54, 67}) {
    const std::vector<double> a = random_vec(rng, n * n);
    const std::vector<double> x = random_vec(rng, n);
    std::vector<double> y(n);
    kernels::scalar::matvec(n, a.data(), x.data(), y.data());

    Eigen::Map<const Eigen::MatrixXd> A(a.data(), n, n);
    Eigen::Map<const Eigen::VectorXd> X(x.data(), n);
    Eigen::VectorXd Y = A * X;
    for (int i = 0; i < n; ++i) CHECK(close(y[i], Y(i), 1e-13));
  }
}

TEST_CASE("simd variants agree with the scalar reference") {
  if (kernels::best_supported() == kernels::Isa::Scalar) {
    MESSAGE("no simd variant available on this cpu; skipping equivalence sweep");
    return;
  }
  const kernels::Table& simd = kernels::table_for(kernels::Isa::Avx2);
  std::mt19937 rng(11);

  for (int n : {1, 2, 3, 4, 5, 7, 8, 12, 33, 54, 67}) {
    const std::vector<double> a = random_vec(rng, n * n);
    const std::vector<double> x = random_vec(rng, n);
    const std::vector<double> w = random_vec(rng, n);

    std::vector<double> ys(n), yv(n);
    kernels::scalar::matvec(n, a.data(), x.data(), ys.data());
    simd.matvec(n, a.data(), x.data(), yv.data());
    for (int i = 0; i < n; ++i) CHECK(close(ys[i], yv[i], 1e-13));

    std::vector<double> zs = w, zv = w;
    kernels::scalar::axpy(n, 1.7, x.data(), zs.data());
    simd.axpy(n, 1.7, x.data(), zv.data());
    for (int i = 0; i < n; ++i) CHECK(close(zs[i], zv[i], 1e-14));

    kernels::scalar::add_scaled(n, w.data(), -0.3, x.data(), zs.data());
    simd.add_scaled(n, w.data(), -0.3, x.data(), zv.data());
    for (int i = 0; i < n; ++i) CHECK(close(zs[i], zv[i], 1e-14));

    const std::vector<double> k1 = random_vec(rng, n), k2 = random_vec(rng, n);
    const std::vector<double> k3 = random_vec(rng, n), k4 = random_vec(rng, n);
    kernels::scalar::rk4_combine(n, w.data(), 1e-3 / 6.0, k1.data(), k2.data(), k3.data(),
                                 k4.data(), zs.data());
    simd.rk4_combine(n, w.data(), 1e-3 / 6.0, k1.data(), k2.data(), k3.data(), k4.data(),
                     zv.data());
    for (int i = 0; i < n; ++i) CHECK(close(zs[i], zv[i], 1e-14));

    CHECK(close(kernels::scalar::dot(n, x.data(), w.data()), simd.dot(n, x.data(), w.data()),
                1e-12));
    CHECK(close(kernels::scalar::sum(n, x.data()), simd.sum(n, x.data()), 1e-12));
  }
}

TEST_CASE("penalty gradient kernel: cases and simd equivalence") {
  std::mt19937 rng(23);
  for (int n : {1, 3, 4, 9, 54, 61}) {
    std::vector<double> b = random_vec(rng, n, 0.0, 5.0);
    std::vector<double> c = random_vec(rng, n, 0.1, 2.0);
    std::vector<double> lo = random_vec(rng, n, 0.0, 1.0);
    std::vector<double> hi = lo;
    for (double& x : hi) x += 2.0;
    std::vector<double> p = random_vec(rng, n, -1.0, 4.0);
    // Exercise the exact-boundary branch on a few slots.
    if (n >= 3) {
      p[0] = lo[0];
      p[1] = hi[1];
    }
    const double inv_eps = 100.0;

    std::vector<double> gs(n);
    kernels::scalar::quad_penalty_grad(n, b.data(), c.data(), lo.data(), hi.data(), inv_eps,
                                       p.data(), gs.data());
    for (int i = 0; i < n; ++i) {
      double expect = b[i] + 2.0 * c[i] * p[i];
      if (p[i] > hi[i]) expect += inv_eps;
      if (p[i] < lo[i]) expect -= inv_eps;
      CHECK(gs[i] == doctest::Approx(expect).epsilon(1e-14));
    }
    // Boundary hits take the interior branch.
    if (n >= 3) {
      CHECK(gs[0] == doctest::Approx(b[0] + 2.0 * c[0] * p[0]).epsilon(1e-14));
      CHECK(gs[1] == doctest::Approx(b[1] + 2.0 * c[1] * p[1]).epsilon(1e-14));
    }

    if (kernels::best_supported() != kernels::Isa::Scalar) {
      const kernels::Table& simd = kernels::table_for(kernels::Isa::Avx2);
      std::vector<double> gv(n);
      simd.quad_penalty_grad(n, b.data(), c.data(), lo.data(), hi.data(), inv_eps, p.data(),
                             gv.data());
      for (int i = 0; i < n; ++i) CHECK(close(gs[i], gv[i], 1e-14));
    }
  }
}

TEST_CASE("kernel selection") {
  const kernels::Table& scalar = kernels::table_for(kernels::Isa::Scalar);
  CHECK(std::string(scalar.name) == "scalar");
  kernels::select(kernels::Isa::Scalar);
  CHECK(std::string(kernels::active().name) == "scalar");
  kernels::select(kernels::best_supported());
  CHECK(std::string(kernels::active().name) ==
        std::string(kernels::isa_name(kernels::best_supported())));
}
