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
#include "gpmw/posterior.hpp"

using namespace gpmw;

namespace {

std::vector<double> random_point(Rng& rng, int dim, double scale = 4.0) {
  std::vector<double> p(dim);
  for (double& v : p) v = scale * (rng.uniform01() - 0.5);
  return p;
}

// Dense from-scratch posterior: explicit solve of the closed-form mean and
// variance equations, recomputed every call. The oracle side of the
// incremental implementation's dual-route checks.
struct DenseOracle {
  KernelSpec kernel;
  double noise_var;
  std::vector<std::vector<double>> points;
  std::vector<double> y;

  void add(std::span<const double> p, double obs) {
    points.emplace_back(p.begin(), p.end());
    y.push_back(obs);
  }

  Prediction predict(std::span<const double> q) const {
    const int t = static_cast<int>(points.size());
    const double kqq = eval_kernel(kernel, q, q);
    if (t == 0) return {0.0, std::sqrt(kqq)};
    Eigen::MatrixXd K(t, t);
    Eigen::VectorXd kv(t), yv(t);
    for (int i = 0; i < t; ++i) {
      for (int j = 0; j < t; ++j) {
        K(i, j) = eval_kernel(kernel, points[i], points[j]);
      }
      kv(i) = eval_kernel(kernel, points[i], q);
      yv(i) = y[i];
    }
    K.diagonal().array() += noise_var;
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    const double mean = kv.dot(llt.solve(yv));
    const double var = kqq - kv.dot(llt.solve(kv));
    return {mean, std::sqrt(std::max(var, 0.0))};
  }

  double info_gain() const {
    const int t = static_cast<int>(points.size());
    if (t == 0) return 0.0;
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(t, t);
    for (int i = 0; i < t; ++i) {
      for (int j = 0; j < t; ++j) {
        m(i, j) += eval_kernel(kernel, points[i], points[j]) / noise_var;
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    double logdet = 0.0;
    for (int i = 0; i < t; ++i) logdet += std::log(llt.matrixL()(i, i));
    return logdet;  // = 1/2 log det
  }

  double log_marginal_likelihood() const {
    const int t = static_cast<int>(points.size());
    Eigen::MatrixXd K(t, t);
    Eigen::VectorXd yv(t);
    for (int i = 0; i < t; ++i) {
      for (int j = 0; j < t; ++j) {
        K(i, j) = eval_kernel(kernel, points[i], points[j]);
      }
      yv(i) = y[i];
    }
    K.diagonal().array() += noise_var;
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    double logdet = 0.0;
    for (int i = 0; i < t; ++i) logdet += std::log(llt.matrixL()(i, i));
    return -0.5 * yv.dot(llt.solve(yv)) - logdet -
           0.5 * t * std::log(2.0 * M_PI);
  }
};

}  // namespace

TEST_CASE("empty posterior returns the prior") {
  GpPosterior gp(KernelSpec::se(1.0), 1.0);
  std::vector<double> a{0.3, -0.7};
  auto p = gp.predict(a);
  CHECK(p.mean == 0.0);
  CHECK(p.stddev == doctest::Approx(1.0));
}

TEST_CASE("single observation closed form") {
  GpPosterior gp(KernelSpec::se(1.0), 1.0);
  std::vector<double> a{1.0};
  gp.append(a, 1.0);
  auto p = gp.predict(a);
  CHECK(p.mean == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p.stddev * p.stddev == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("beta schedule") {
  // log(2/delta) = 2 at delta = 2/e^2; gamma = 0 gives B + 2.
  ConfidenceSchedule s{1.0, 2.0 / (M_E * M_E)};
  CHECK(beta(s, 0.0) == doctest::Approx(3.0).epsilon(1e-12));
  // Frozen from an independent scalar evaluation of the formula.
  ConfidenceSchedule s2{2.0, 0.1};
  CHECK(beta(s2, 5.0) == doctest::Approx(5.998932926057648).epsilon(1e-12));
  CHECK_THROWS_AS(beta({0.0, 2.0}, 0.0), ConfigError);
  CHECK_THROWS_AS(beta({1.0, 0.0}, 0.0), ConfigError);
  CHECK_THROWS_AS(beta({1.0, 1.0}, 0.0), ConfigError);
  // Nondecreasing in the information gain.
  CHECK(beta(s2, 6.0) > beta(s2, 5.0));
}

TEST_CASE("ucb and lcb") {
  GpPosterior gp(KernelSpec::se(1.0), 1.0);
  std::vector<double> a{0.0};
  CHECK(ucb(gp, 3.0, a) == doctest::Approx(3.0));
  CHECK(lcb(gp, 3.0, a) == doctest::Approx(-3.0));
  gp.append(a, 1.0);
  CHECK(ucb(gp, 0.0, a) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ucb(gp, 1.0, a) ==
        doctest::Approx(0.5 + std::sqrt(0.5)).epsilon(1e-12));
  CHECK(lcb(gp, 1.0, a) ==
        doctest::Approx(0.5 - std::sqrt(0.5)).epsilon(1e-12));
  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    auto q = random_point(rng, 1);
    CHECK(lcb(gp, 2.0, q) <= ucb(gp, 2.0, q));
  }
}

TEST_CASE("information gain closed forms") {
  GpPosterior gp(KernelSpec::se(1.0), 1.0);
  std::vector<double> a{0.5};
  gp.append(a, 0.3);
  CHECK(gp.info_gain() == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
  gp.append(a, 0.1);  // same point again: det [[2,1],[1,2]] = 3
  CHECK(gp.info_gain() == doctest::Approx(0.5 * std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("incremental posterior matches the dense oracle") {
  for (auto kernel :
       {KernelSpec::se(1.0), KernelSpec::matern(2.5, 1.5),
        KernelSpec::polynomial(2, 1.0, 4.0)}) {
    Rng rng(23);
    const double noise_var = 0.5;
    GpPosterior gp(kernel, noise_var);
    DenseOracle oracle{kernel, noise_var, {}, {}};
    for (int i = 0; i < 50; ++i) {
      auto p = random_point(rng, 3);
      const double y = rng.normal();
      gp.append(p, y);
      oracle.add(p, y);
    }
    std::vector<std::vector<double>> queries;
    for (int q = 0; q < 20; ++q) queries.push_back(random_point(rng, 3));
    auto batch = predict_batch(gp, queries);
    for (int q = 0; q < 20; ++q) {
      auto expect = oracle.predict(queries[q]);
      CHECK(batch[q].mean == doctest::Approx(expect.mean).epsilon(1e-8));
      CHECK(batch[q].stddev * batch[q].stddev ==
            doctest::Approx(expect.stddev * expect.stddev).epsilon(1e-8));
    }
    CHECK(gp.info_gain() == doctest::Approx(oracle.info_gain()).epsilon(1e-8));
    CHECK(gp.log_marginal_likelihood() ==
          doctest::Approx(oracle.log_marginal_likelihood()).epsilon(1e-8));
  }
}

TEST_CASE("running information gain equals the batch value after every append") {
  Rng rng(31);
  GpPosterior gp(KernelSpec::se(0.8), 0.25);
  DenseOracle oracle{KernelSpec::se(0.8), 0.25, {}, {}};
  for (int i = 0; i < 60; ++i) {
    auto p = random_point(rng, 2);
    const double y = rng.normal();
    gp.append(p, y);
    oracle.add(p, y);
    CHECK(gp.info_gain() ==
          doctest::Approx(oracle.info_gain()).epsilon(1e-8));
    CHECK(gp.info_gain() >= -1e-12);
  }
}

TEST_CASE("information gain is nondecreasing") {
  Rng rng(37);
  GpPosterior gp(KernelSpec::matern(1.5, 1.0), 0.1);
  double last = 0.0;
  for (int i = 0; i < 40; ++i) {
    gp.append(random_point(rng, 2), rng.normal());
    CHECK(gp.info_gain() >= last - 1e-12);
    last = gp.info_gain();
  }
}

TEST_CASE("appending never increases posterior variance") {
  Rng rng(41);
  GpPosterior gp(KernelSpec::se(1.0), 0.3);
  std::vector<std::vector<double>> probes;
  for (int q = 0; q < 10; ++q) probes.push_back(random_point(rng, 2));
  std::vector<double> last(probes.size(),
                           std::numeric_limits<double>::infinity());
  for (int i = 0; i < 30; ++i) {
    gp.append(random_point(rng, 2), rng.normal());
    for (std::size_t q = 0; q < probes.size(); ++q) {
      const double sd = gp.predict(probes[q]).stddev;
      CHECK(sd <= last[q] + 1e-10);
      CHECK(sd >= 0.0);
      CHECK(sd * sd <= eval_kernel(gp.kernel(), probes[q], probes[q]) + 1e-12);
      last[q] = sd;
    }
  }
}

TEST_CASE("factor reconstructs the regularized kernel matrix") {
  Rng rng(43);
  GpPosterior gp(KernelSpec::se(1.0), 1e-10);
  std::vector<double> a{0.2, 0.4};
  // Repeated identical points stress the bordered update.
  for (int i = 0; i < 30; ++i) gp.append(a, rng.normal());
  CHECK(gp.factor_reconstruction_error() <= 1e-8);

  GpPosterior gp2(KernelSpec::matern(0.5, 2.0), 0.5);
  for (int i = 0; i < 40; ++i) gp2.append(random_point(rng, 3), rng.normal());
  CHECK(gp2.factor_reconstruction_error() <= 1e-8);
}

TEST_CASE("input validation and protocol errors") {
  GpPosterior gp(KernelSpec::se(1.0), 1.0);
  std::vector<double> a{0.0};
  CHECK_THROWS_AS(gp.append(a, std::nan("")), InputError);
  std::vector<double> bad{std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(gp.append(bad, 1.0), InputError);
  CHECK_THROWS_AS(GpPosterior(KernelSpec::se(1.0), 0.0), ConfigError);
}

TEST_CASE("fixed query predictor matches fresh predictions") {
  Rng rng(47);
  GpPosterior gp(KernelSpec::se(1.2), 0.09);
  std::vector<std::vector<double>> queries;
  for (int q = 0; q < 40; ++q) queries.push_back(random_point(rng, 2));
  FixedQueryPredictor predictor(gp, queries);
  for (int i = 0; i < 50; ++i) {
    gp.append(random_point(rng, 2), rng.normal());
    predictor.sync(gp);
    if (i % 10 != 0) continue;
    for (int q = 0; q < 40; ++q) {
      auto direct = gp.predict(queries[q]);
      auto inc = predictor.prediction(q);
      CHECK(inc.mean == doctest::Approx(direct.mean).epsilon(1e-10));
      CHECK(inc.stddev == doctest::Approx(direct.stddev).epsilon(1e-10));
    }
  }
}

TEST_CASE("prior mean shifts predictions by a constant") {
  Rng rng(53);
  GpPosterior centered(KernelSpec::se(1.0), 0.2, 0.0);
  GpPosterior shifted(KernelSpec::se(1.0), 0.2, 2.5);
  for (int i = 0; i < 25; ++i) {
    auto p = random_point(rng, 2);
    const double y = rng.normal();
    centered.append(p, y);
    shifted.append(p, y + 2.5);
  }
  for (int q = 0; q < 10; ++q) {
    auto probe = random_point(rng, 2);
    auto c = centered.predict(probe);
    auto s = shifted.predict(probe);
    CHECK(s.mean == doctest::Approx(c.mean + 2.5).epsilon(1e-10));
    CHECK(s.stddev == doctest::Approx(c.stddev).epsilon(1e-12));
  }
}

TEST_CASE("dense cholesky applies jitter on rank-deficient input") {
  // Rank-one matrix: needs jitter to factor.
  const int n = 4;
  std::vector<double> m(n * n, 1.0);
  const double applied = dense_cholesky(m, n, 1e-9);
  CHECK(applied > 0.0);
  // Reconstruction stays close to the original plus jitter.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double rec = 0.0;
      for (int k = 0; k <= j; ++k) rec += m[i * n + k] * m[j * n + k];
      const double target = 1.0 + (i == j ? applied : 0.0);
      CHECK(rec == doctest::Approx(target).epsilon(1e-6));
    }
  }
  std::vector<double> neg{1.0, 0.0, 0.0, -5.0};
  CHECK_THROWS_AS(dense_cholesky(neg, 2, 1e-9, 1), NumericalError);
}
