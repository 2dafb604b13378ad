#include "doctest.h"

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "glmr/kernels.hpp"
#include "glmr/tensor.hpp"

using namespace glmr;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double lo = -2.0, double hi = 2.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

}  // namespace

TEST_CASE("scalar kernels reference results") {
  double a[4] = {1, 2, 3, 4};
  double b[4] = {5, 6, 7, 8};
  CHECK(kernels::dot_scalar(a, b, 4) == doctest::Approx(70.0));

  double y[3] = {1, 1, 1};
  double x[3] = {1, 2, 3};
  kernels::axpy_scalar(2.0, x, y, 3);
  CHECK(y[0] == doctest::Approx(3.0));
  CHECK(y[2] == doctest::Approx(7.0));

  double out[4];
  kernels::mul_scalar(a, b, out, 4);
  CHECK(out[3] == doctest::Approx(32.0));
  kernels::add_scalar_k(a, b, out, 4);
  CHECK(out[0] == doctest::Approx(6.0));

  double s[3] = {1, 2, 3};
  kernels::scale_scalar(0.5, s, 3);
  CHECK(s[1] == doctest::Approx(1.0));

  // [[1,2],[3,4]] * [[5],[6]] = [[17],[39]]
  double ma[4] = {1, 2, 3, 4};
  double mb[2] = {5, 6};
  double mc[2] = {0, 0};
  kernels::matmul_acc_scalar(ma, mb, mc, 2, 2, 1);
  CHECK(mc[0] == doctest::Approx(17.0));
  CHECK(mc[1] == doctest::Approx(39.0));
}

TEST_CASE("dispatched kernels match the scalar lane on random sizes") {
  Rng rng(99);
  for (std::size_t n : {15ul, 1ul, 7ul, 8ul, 63ul, 64ul, 257ul}) {
    std::vector<double> a = random_vec(rng, n), b = random_vec(rng, n);

    kernels::force_scalar(true);
    double dot_ref = kernels::dot(a.data(), b.data(), n);
    kernels::force_scalar(false);
    double dot_fast = kernels::dot(a.data(), b.data(), n);
    CHECK(dot_fast == doctest::Approx(dot_ref).epsilon(1e-12));

    std::vector<double> y1 = random_vec(rng, n), y2 = y1;
    kernels::force_scalar(true);
    kernels::axpy(1.7, a.data(), y1.data(), n);
    kernels::force_scalar(false);
    kernels::axpy(1.7, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-14));

    std::vector<double> o1(n), o2(n);
    kernels::force_scalar(true);
    kernels::mul(a.data(), b.data(), o1.data(), n);
    kernels::add(a.data(), b.data(), o2.data(), n);
    std::vector<double> r1 = o1, r2 = o2;
    kernels::force_scalar(false);
    kernels::mul(a.data(), b.data(), o1.data(), n);
    kernels::add(a.data(), b.data(), o2.data(), n);
    CHECK(o1 == r1);
    CHECK(o2 == r2);
  }
  kernels::force_scalar(false);
}

TEST_CASE("dispatched matmul matches scalar on random shapes") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    std::size_t m = 1 + rng.integer(9), k = 1 + rng.integer(9), n = 1 + rng.integer(9);
    std::vector<double> a = random_vec(rng, m * k), b = random_vec(rng, k * n);
    std::vector<double> c1(m * n, 0.1), c2 = c1;
    kernels::force_scalar(true);
    kernels::matmul_acc(a.data(), b.data(), c1.data(), m, k, n);
    kernels::force_scalar(false);
    kernels::matmul_acc(a.data(), b.data(), c2.data(), m, k, n);
    for (std::size_t i = 0; i < m * n; ++i)
      CHECK(c1[i] == doctest::Approx(c2[i]).epsilon(1e-12));
  }
  kernels::force_scalar(false);
}

TEST_CASE("active arch reports a known lane") {
  std::string arch = kernels::active_arch();
  CHECK((arch == "scalar" || arch == "avx2"));
  kernels::force_scalar(true);
  CHECK(std::string(kernels::active_arch()) == "scalar");
  kernels::force_scalar(false);
}
