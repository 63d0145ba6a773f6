// Copyright 2026 The gpmw Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include <Eigen/Dense>

#include "doctest.h"
#include "gpmw/kernel.hpp"

using namespace gpmw;

namespace {

// General Bessel-form Matern, evaluated numerically. Independent oracle for
// the closed forms used in the implementation.
double matern_bessel(double nu, double l, double s) {
  if (s == 0.0) return 1.0;
  const double x = s * std::sqrt(2.0 * nu) / l;
  return std::pow(2.0, 1.0 - nu) / std::tgamma(nu) * std::pow(x, nu) *
         std::cyl_bessel_k(nu, x);
}

std::vector<double> random_point(Rng& rng, int dim, double scale = 3.0) {
  std::vector<double> p(dim);
  for (double& v : p) v = scale * (rng.uniform01() - 0.5);
  return p;
}

}  // namespace

TEST_CASE("se kernel at zero distance is one") {
  auto k = KernelSpec::se(2.0);
  std::vector<double> a{1.0, -2.0, 0.5};
  CHECK(eval_kernel(k, a, a) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("linear-case polynomial kernel vanishes on orthogonal inputs") {
  auto k = KernelSpec::polynomial(1, 0.0, 1.0);
  std::vector<double> a{1.0, 0.0}, b{0.0, 1.0};
  CHECK(eval_kernel(k, a, b) == 0.0);
}

TEST_CASE("matern closed forms match the Bessel form") {
  // nu = 1/2, l = 1, s = 2: closed form exp(-2).
  auto k_half = KernelSpec::matern(0.5, 1.0);
  std::vector<double> a{0.0}, b{2.0};
  CHECK(eval_kernel(k_half, a, b) ==
        doctest::Approx(0.1353352832366127).epsilon(1e-12));
  CHECK(eval_kernel(k_half, a, b) ==
        doctest::Approx(matern_bessel(0.5, 1.0, 2.0)).epsilon(1e-10));

  for (double nu : {0.5, 1.5, 2.5}) {
    for (double l : {0.7, 1.0, 3.0}) {
      auto k = KernelSpec::matern(nu, l);
      for (double s : {0.1, 0.5, 1.0, 2.0, 4.9}) {
        std::vector<double> p{0.0}, q{s};
        CHECK(eval_kernel(k, p, q) ==
              doctest::Approx(matern_bessel(nu, l, s)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("unit diagonal for se and matern") {
  Rng rng(11);
  for (int i = 0; i < 20; ++i) {
    auto p = random_point(rng, 4);
    CHECK(eval_kernel(KernelSpec::se(1.7), p, p) == doctest::Approx(1.0));
    CHECK(eval_kernel(KernelSpec::matern(1.5, 0.9), p, p) ==
          doctest::Approx(1.0));
  }
}

TEST_CASE("symmetry and nonnegative diagonal") {
  Rng rng(5);
  std::vector<KernelSpec> kernels{
      KernelSpec::se(1.0), KernelSpec::matern(2.5, 2.0),
      KernelSpec::polynomial(3, 1.0, 2.0), KernelSpec::linear(1.5)};
  for (const auto& k : kernels) {
    for (int i = 0; i < 20; ++i) {
      auto a = random_point(rng, 3);
      auto b = random_point(rng, 3);
      CHECK(eval_kernel(k, a, b) == eval_kernel(k, b, a));
      CHECK(eval_kernel(k, a, a) >= 0.0);
    }
  }
}

TEST_CASE("kernel matrix is positive semidefinite") {
  Rng rng(17);
  std::vector<KernelSpec> kernels{KernelSpec::se(1.0),
                                  KernelSpec::matern(1.5, 1.0),
                                  KernelSpec::polynomial(2, 1.0, 3.0)};
  for (const auto& k : kernels) {
    const int n = 30;
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < n; ++i) pts.push_back(random_point(rng, 3));
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) m(i, j) = eval_kernel(k, pts[i], pts[j]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8);
  }
}

TEST_CASE("product kernel multiplies factor evaluations on selected coords") {
  auto k = KernelSpec::product({{KernelSpec::linear(1.0), {0, 1}},
                                {KernelSpec::se(2.0), {2, 3}}});
  std::vector<double> a{1.0, 2.0, 0.0, 0.0}, b{3.0, -1.0, 1.0, 2.0};
  std::vector<double> a1{1.0, 2.0}, b1{3.0, -1.0};
  std::vector<double> a2{0.0, 0.0}, b2{1.0, 2.0};
  const double expected = eval_kernel(KernelSpec::linear(1.0), a1, b1) *
                          eval_kernel(KernelSpec::se(2.0), a2, b2);
  CHECK(eval_kernel(k, a, b) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("product kernel with non-contiguous selectors") {
  auto k = KernelSpec::product({{KernelSpec::se(1.0), {0, 2}},
                                {KernelSpec::linear(1.0), {1}}});
  std::vector<double> a{1.0, 2.0, 3.0}, b{0.0, 4.0, 3.0};
  std::vector<double> a1{1.0, 3.0}, b1{0.0, 3.0};
  const double expected =
      eval_kernel(KernelSpec::se(1.0), a1, b1) * (2.0 * 4.0);
  CHECK(eval_kernel(k, a, b) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("input validation") {
  auto k = KernelSpec::se(1.0);
  std::vector<double> a{1.0, 2.0}, short_b{1.0};
  CHECK_THROWS_AS(eval_kernel(k, a, short_b), InputError);
  std::vector<double> nan_b{1.0, std::nan("")};
  CHECK_THROWS_AS(eval_kernel(k, a, nan_b), InputError);
  auto prod = KernelSpec::product({{KernelSpec::se(1.0), {0, 5}}});
  CHECK_THROWS_AS(eval_kernel(prod, a, a), InputError);
}

TEST_CASE("hyperparameter validation") {
  CHECK_THROWS_AS(validate_kernel(KernelSpec::se(0.0)), ConfigError);
  CHECK_THROWS_AS(validate_kernel(KernelSpec::se(-1.0)), ConfigError);
  CHECK_THROWS_AS(validate_kernel(KernelSpec::matern(2.0, 1.0)), ConfigError);
  CHECK_THROWS_AS(validate_kernel(KernelSpec::polynomial(0, 1.0, 1.0)),
                  ConfigError);
  CHECK_THROWS_AS(validate_kernel(KernelSpec::polynomial(2, -1.0, 1.0)),
                  ConfigError);
  CHECK_THROWS_AS(validate_kernel(KernelSpec::product({})), ConfigError);
  CHECK_NOTHROW(validate_kernel(KernelSpec::matern(0.5, 1.0)));
}
