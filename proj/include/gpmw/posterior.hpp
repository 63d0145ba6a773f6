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

#ifndef GPMW_POSTERIOR_HPP_
#define GPMW_POSTERIOR_HPP_

#include <optional>
#include <span>
#include <vector>

#include "gpmw/common.hpp"
#include "gpmw/kernel.hpp"

namespace gpmw {

// beta_t schedule: beta = B + sqrt(2 (gamma_prev + log(2/delta))).
struct ConfidenceSchedule {
  double rkhs_bound = 1.0;  // B
  double delta = 0.1;       // confidence level, in (0, 1)
};

double beta(const ConfidenceSchedule& schedule, double info_gain_prev);

struct Prediction {
  double mean = 0.0;
  double stddev = 0.0;
};

// Incremental Gaussian-process posterior over noisy scalar observations.
//
// Maintains a bordered lower-triangular factorization L of (K_t + sigma^2 I)
// that grows by one row per appended observation (O(t^2) per append, existing
// rows never change), the whitened observation vector w = L^{-1}(y - m0), and
// the running information gain 1/2 log det(I + sigma^{-2} K_t).
//
// Single-writer semantics: appends from one owner at a time; predictions are
// const and may run concurrently between appends.
class GpPosterior {
 public:
  GpPosterior(KernelSpec kernel, double noise_variance, double prior_mean = 0.0);

  int size() const { return static_cast<int>(y_.size()); }
  double info_gain() const { return info_gain_; }
  double noise_variance() const { return noise_var_; }
  double prior_mean() const { return prior_mean_; }
  const KernelSpec& kernel() const { return kernel_; }
  const std::vector<std::vector<double>>& points() const { return points_; }
  std::span<const double> observations() const { return y_; }
  std::span<const double> whitened() const { return w_; }

  // Row i of L (length i + 1). Rows are immutable once written.
  std::span<const double> factor_row(int i) const;

  // Appends one observation, extending the factorization by a bordered row.
  // On a nonpositive pivot, retries with diagonal jitter 1e-9 growing 10x up
  // to 3 times, then throws NumericalError. Throws InputError on non-finite
  // input.
  void append(std::span<const double> point, double y);

  // Posterior mean / stddev at a query point via two triangular solves
  // against the stored factor. Empty history returns (m0, sqrt(k(a,a))).
  Prediction predict(std::span<const double> point) const;
  // Same, reusing caller scratch (hot loops).
  Prediction predict_with_scratch(std::span<const double> point,
                                  std::vector<double>& scratch) const;

  double log_marginal_likelihood() const;

  // Relative Frobenius error of L L^T against a fresh K_t + sigma^2 I
  // (diagnostic; O(t^2) kernel evaluations).
  double factor_reconstruction_error() const;

 private:
  KernelSpec kernel_;
  double noise_var_;
  double prior_mean_;
  std::vector<std::vector<double>> points_;
  std::vector<double> y_;
  std::vector<double> factor_;  // packed rows: row i at offset i(i+1)/2
  std::vector<double> w_;
  double info_gain_ = 0.0;
};

double ucb(const GpPosterior& gp, double beta, std::span<const double> point);
double lcb(const GpPosterior& gp, double beta, std::span<const double> point);

// Batch prediction over many query points. The OpenMP version parallelizes
// over queries; the serial version is the reference kept for testing. Both
// produce bitwise-identical results.
std::vector<Prediction> predict_batch(
    const GpPosterior& gp, const std::vector<std::vector<double>>& points);
std::vector<Prediction> predict_batch_serial(
    const GpPosterior& gp, const std::vector<std::vector<double>>& points);

// Incremental predictions over a fixed query set.
//
// Exploits that bordered appends never modify existing factor rows: per
// query it keeps v = L^{-1} k(X, q) and extends it by one entry per
// observation (O(t) per query instead of a fresh O(t^2) solve). Used by the
// selection rules that sweep a full candidate grid every round.
class FixedQueryPredictor {
 public:
  FixedQueryPredictor(const GpPosterior& gp,
                      std::vector<std::vector<double>> queries);

  // Folds in observations appended to gp since the last call.
  void sync(const GpPosterior& gp);

  int num_queries() const { return static_cast<int>(queries_.size()); }
  Prediction prediction(int query) const;

 private:
  std::vector<std::vector<double>> queries_;
  std::vector<double> kqq_;              // k(q, q)
  std::vector<std::vector<double>> v_;   // per query, length = seen_
  std::vector<double> sumsq_;            // ||v||^2 per query
  std::vector<double> dotw_;             // v . w per query
  double prior_mean_ = 0.0;
  int seen_ = 0;
};

// Dense lower-triangular Cholesky of a row-major n x n matrix, in place
// (strict upper left untouched). On pivot failure adds `jitter` to the
// remaining diagonal and restarts, growing it 10x up to `retries` times.
// Returns the jitter actually applied. Throws NumericalError when defeated.
double dense_cholesky(std::vector<double>& a, int n, double jitter = 1e-9,
                      int retries = 3);

}  // namespace gpmw

#endif  // GPMW_POSTERIOR_HPP_
