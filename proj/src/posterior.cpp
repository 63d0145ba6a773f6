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

#include "gpmw/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gpmw {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double dot(std::span<const double> a, std::span<const double> b,
           std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

double beta(const ConfidenceSchedule& schedule, double info_gain_prev) {
  if (!(schedule.delta > 0.0 && schedule.delta < 1.0)) {
    throw ConfigError("beta: delta must lie in (0, 1)");
  }
  if (schedule.rkhs_bound < 0.0) {
    throw ConfigError("beta: rkhs_bound must be nonnegative");
  }
  if (!(info_gain_prev >= 0.0)) {
    throw InputError("beta: information gain must be nonnegative");
  }
  return schedule.rkhs_bound +
         std::sqrt(2.0 * (info_gain_prev + std::log(2.0 / schedule.delta)));
}

GpPosterior::GpPosterior(KernelSpec kernel, double noise_variance,
                         double prior_mean)
    : kernel_(std::move(kernel)),
      noise_var_(noise_variance),
      prior_mean_(prior_mean) {
  validate_kernel(kernel_);
  if (!(noise_var_ > 0.0)) {
    throw ConfigError("GpPosterior: noise variance must be positive");
  }
}

std::span<const double> GpPosterior::factor_row(int i) const {
  std::size_t off = static_cast<std::size_t>(i) * (i + 1) / 2;
  return std::span<const double>(factor_).subspan(off, i + 1);
}

void GpPosterior::append(std::span<const double> point, double y) {
  if (!std::isfinite(y)) throw InputError("append: non-finite observation");
  if (!all_finite(point)) throw InputError("append: non-finite point");

  const int t = size();
  std::vector<double> row(t + 1);
  for (int i = 0; i < t; ++i) row[i] = eval_kernel(kernel_, points_[i], point);
  const double kaa = eval_kernel(kernel_, point, point);

  // Forward substitution: row[0..t) <- L^{-1} k_t(point).
  for (int i = 0; i < t; ++i) {
    auto li = factor_row(i);
    row[i] = (row[i] - dot(li, row, i)) / li[i];
  }
  double csq = dot(row, row, t);

  double jitter = 0.0;
  double pivot_sq = kaa + noise_var_ - csq;
  for (int attempt = 0; pivot_sq <= 0.0 && attempt < 3; ++attempt) {
    jitter = (jitter == 0.0) ? 1e-9 : jitter * 10.0;
    pivot_sq = kaa + noise_var_ + jitter - csq;
  }
  if (pivot_sq <= 0.0) {
    std::ostringstream os;
    os << "append: factorization breakdown at t=" << t + 1
       << " (pivot^2=" << kaa + noise_var_ - csq
       << " after jitter=" << jitter << ")";
    throw NumericalError(os.str());
  }
  const double pivot = std::sqrt(pivot_sq);
  row[t] = pivot;

  const double wnew = (y - prior_mean_ - dot(row, w_, t)) / pivot;

  factor_.insert(factor_.end(), row.begin(), row.end());
  w_.push_back(wnew);
  points_.emplace_back(point.begin(), point.end());
  y_.push_back(y);
  // pivot^2 = sigma_{t-1}^2(point) + sigma^2 (+ jitter), so this increment
  // keeps info_gain equal to 1/2 log det(I + sigma^{-2} K_t).
  info_gain_ += 0.5 * std::log(pivot_sq / noise_var_);
}

Prediction GpPosterior::predict(std::span<const double> point) const {
  std::vector<double> scratch;
  return predict_with_scratch(point, scratch);
}

Prediction GpPosterior::predict_with_scratch(
    std::span<const double> point, std::vector<double>& scratch) const {
  if (!all_finite(point)) throw InputError("predict: non-finite point");
  const double kaa = eval_kernel(kernel_, point, point);
  const int t = size();
  if (t == 0) return {prior_mean_, std::sqrt(std::max(0.0, kaa))};

  scratch.resize(t);
  for (int i = 0; i < t; ++i) {
    scratch[i] = eval_kernel(kernel_, points_[i], point);
  }
  for (int i = 0; i < t; ++i) {
    auto li = factor_row(i);
    scratch[i] = (scratch[i] - dot(li, scratch, i)) / li[i];
  }
  const double mean = prior_mean_ + dot(scratch, w_, t);
  double var = kaa - dot(scratch, scratch, t);
  if (var < 0.0) var = 0.0;  // roundoff clamp; variance lives in [0, k(a,a)]
  return {mean, std::sqrt(var)};
}

double GpPosterior::log_marginal_likelihood() const {
  const int t = size();
  double quad = 0.0, logdet = 0.0;
  for (int i = 0; i < t; ++i) {
    quad += w_[i] * w_[i];
    logdet += std::log(factor_row(i)[i]);
  }
  return -0.5 * quad - logdet - 0.5 * t * std::log(kTwoPi);
}

double GpPosterior::factor_reconstruction_error() const {
  const int t = size();
  if (t == 0) return 0.0;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < t; ++i) {
    auto li = factor_row(i);
    for (int j = 0; j <= i; ++j) {
      auto lj = factor_row(j);
      double rec = dot(li, lj, j + 1);
      double target = eval_kernel(kernel_, points_[i], points_[j]);
      if (i == j) target += noise_var_;
      double diff = rec - target;
      double wgt = (i == j) ? 1.0 : 2.0;  // symmetric off-diagonal pair
      num += wgt * diff * diff;
      den += wgt * target * target;
    }
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

double ucb(const GpPosterior& gp, double beta, std::span<const double> point) {
  auto p = gp.predict(point);
  return p.mean + beta * p.stddev;
}

double lcb(const GpPosterior& gp, double beta, std::span<const double> point) {
  auto p = gp.predict(point);
  return p.mean - beta * p.stddev;
}

std::vector<Prediction> predict_batch(
    const GpPosterior& gp, const std::vector<std::vector<double>>& points) {
  std::vector<Prediction> out(points.size());
  const auto n = static_cast<std::int64_t>(points.size());
#pragma omp parallel
  {
    std::vector<double> scratch;
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      out[static_cast<std::size_t>(i)] =
          gp.predict_with_scratch(points[static_cast<std::size_t>(i)], scratch);
    }
  }
  return out;
}

std::vector<Prediction> predict_batch_serial(
    const GpPosterior& gp, const std::vector<std::vector<double>>& points) {
  std::vector<Prediction> out(points.size());
  std::vector<double> scratch;
  for (std::size_t i = 0; i < points.size(); ++i) {
    out[i] = gp.predict_with_scratch(points[i], scratch);
  }
  return out;
}

FixedQueryPredictor::FixedQueryPredictor(
    const GpPosterior& gp, std::vector<std::vector<double>> queries)
    : queries_(std::move(queries)),
      kqq_(queries_.size()),
      v_(queries_.size()),
      sumsq_(queries_.size(), 0.0),
      dotw_(queries_.size(), 0.0),
      prior_mean_(gp.prior_mean()) {
  for (std::size_t q = 0; q < queries_.size(); ++q) {
    kqq_[q] = eval_kernel(gp.kernel(), queries_[q], queries_[q]);
  }
  sync(gp);
}

void FixedQueryPredictor::sync(const GpPosterior& gp) {
  const int t = gp.size();
  auto w = gp.whitened();
  for (int s = seen_; s < t; ++s) {
    auto ls = gp.factor_row(s);
    const auto& xs = gp.points()[s];
    const double pivot = ls[s];
    const double ws = w[s];
    const auto nq = static_cast<std::int64_t>(queries_.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t q = 0; q < nq; ++q) {
      auto i = static_cast<std::size_t>(q);
      double kq = eval_kernel(gp.kernel(), xs, queries_[i]);
      double vnew = (kq - dot(ls, v_[i], s)) / pivot;
      v_[i].push_back(vnew);
      sumsq_[i] += vnew * vnew;
      dotw_[i] += vnew * ws;
    }
    ++seen_;
  }
}

Prediction FixedQueryPredictor::prediction(int query) const {
  double var = kqq_[query] - sumsq_[query];
  if (var < 0.0) var = 0.0;
  return {prior_mean_ + dotw_[query], std::sqrt(var)};
}

double dense_cholesky(std::vector<double>& a, int n, double jitter,
                      int retries) {
  const std::vector<double> original = a;
  double applied = 0.0;
  for (int attempt = 0; ; ++attempt) {
    bool ok = true;
    if (attempt > 0) {
      applied = (attempt == 1) ? jitter : applied * 10.0;
      a = original;
      for (int i = 0; i < n; ++i) a[i * n + i] += applied;
    }
    for (int j = 0; j < n && ok; ++j) {
      double d = a[j * n + j];
      for (int k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
      if (d <= 0.0) {
        ok = false;
        break;
      }
      d = std::sqrt(d);
      a[j * n + j] = d;
      for (int i = j + 1; i < n; ++i) {
        double s = a[i * n + j];
        const double* ri = &a[static_cast<std::size_t>(i) * n];
        const double* rj = &a[static_cast<std::size_t>(j) * n];
        for (int k = 0; k < j; ++k) s -= ri[k] * rj[k];
        a[i * n + j] = s / d;
      }
    }
    if (ok) {
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) a[i * n + j] = 0.0;
      }
      return applied;
    }
    if (attempt >= retries) {
      throw NumericalError("dense_cholesky: matrix not positive definite");
    }
  }
}

}  // namespace gpmw
