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

#include "gpmw/kernel.hpp"

#include <cmath>
#include <sstream>

namespace gpmw {
namespace {

bool valid_smoothness(double nu) {
  return nu == 0.5 || nu == 1.5 || nu == 2.5;
}

double powi(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

double sq_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double eval_plain(const KernelSpec& k, std::span<const double> a,
                  std::span<const double> b) {
  switch (k.family) {
    case KernelFamily::kSquaredExponential: {
      double s2 = sq_distance(a, b);
      return std::exp(-s2 / (2.0 * k.lengthscale * k.lengthscale));
    }
    case KernelFamily::kMatern: {
      double s = std::sqrt(sq_distance(a, b));
      double x = s / k.lengthscale;
      if (k.smoothness == 0.5) return std::exp(-x);
      if (k.smoothness == 1.5) {
        double t = std::sqrt(3.0) * x;
        return (1.0 + t) * std::exp(-t);
      }
      double t = std::sqrt(5.0) * x;
      return (1.0 + t + 5.0 * x * x / 3.0) * std::exp(-t);
    }
    case KernelFamily::kPolynomial:
      return powi(k.offset + dot(a, b) / k.lengthscale, k.degree);
    case KernelFamily::kLinear:
      return dot(a, b) / k.lengthscale;
    case KernelFamily::kProduct:
      break;  // handled by caller
  }
  throw InputError("eval_kernel: unsupported family");
}

}  // namespace

KernelSpec KernelSpec::se(double l) {
  KernelSpec k;
  k.family = KernelFamily::kSquaredExponential;
  k.lengthscale = l;
  return k;
}

KernelSpec KernelSpec::matern(double nu, double l) {
  KernelSpec k;
  k.family = KernelFamily::kMatern;
  k.smoothness = nu;
  k.lengthscale = l;
  return k;
}

KernelSpec KernelSpec::polynomial(int n, double b, double l) {
  KernelSpec k;
  k.family = KernelFamily::kPolynomial;
  k.degree = n;
  k.offset = b;
  k.lengthscale = l;
  return k;
}

KernelSpec KernelSpec::linear(double l) {
  KernelSpec k;
  k.family = KernelFamily::kLinear;
  k.lengthscale = l;
  return k;
}

KernelSpec KernelSpec::product(std::vector<KernelFactor> factors) {
  KernelSpec k;
  k.family = KernelFamily::kProduct;
  k.factors = std::move(factors);
  return k;
}

void validate_kernel(const KernelSpec& spec) {
  if (spec.family == KernelFamily::kProduct) {
    if (spec.factors.empty()) {
      throw ConfigError("kernel: product-composite needs at least one factor");
    }
    for (const auto& f : spec.factors) {
      if (f.coords.empty()) {
        throw ConfigError("kernel: factor has an empty coordinate selector");
      }
      for (int c : f.coords) {
        if (c < 0) throw ConfigError("kernel: negative selector index");
      }
      validate_kernel(f.spec);
    }
    return;
  }
  if (!(spec.lengthscale > 0.0)) {
    throw ConfigError("kernel: lengthscale must be positive");
  }
  if (spec.family == KernelFamily::kPolynomial) {
    if (spec.degree < 1) throw ConfigError("kernel: degree must be >= 1");
    if (spec.offset < 0.0) throw ConfigError("kernel: offset must be >= 0");
  }
  if (spec.family == KernelFamily::kMatern && !valid_smoothness(spec.smoothness)) {
    throw ConfigError("kernel: Matern smoothness must be one of {0.5, 1.5, 2.5}");
  }
}

double eval_kernel(const KernelSpec& spec, std::span<const double> a,
                   std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InputError("eval_kernel: input dimension mismatch");
  }
  if (!all_finite(a) || !all_finite(b)) {
    throw InputError("eval_kernel: non-finite input coordinate");
  }
  if (spec.family != KernelFamily::kProduct) return eval_plain(spec, a, b);

  double prod = 1.0;
  std::vector<double> fa, fb;
  for (const auto& factor : spec.factors) {
    const auto& cs = factor.coords;
    for (int c : cs) {
      if (c < 0 || static_cast<std::size_t>(c) >= a.size()) {
        throw InputError("eval_kernel: selector index out of range");
      }
    }
    // Contiguous ascending selectors evaluate on a subspan, no copy.
    bool contiguous = true;
    for (std::size_t j = 1; j < cs.size(); ++j) {
      if (cs[j] != cs[j - 1] + 1) {
        contiguous = false;
        break;
      }
    }
    if (contiguous && factor.spec.family != KernelFamily::kProduct) {
      auto lo = static_cast<std::size_t>(cs.front());
      prod *= eval_plain(factor.spec, a.subspan(lo, cs.size()),
                         b.subspan(lo, cs.size()));
      continue;
    }
    fa.clear();
    fb.clear();
    for (int c : cs) {
      fa.push_back(a[c]);
      fb.push_back(b[c]);
    }
    prod *= eval_kernel(factor.spec, fa, fb);
  }
  return prod;
}

std::string kernel_to_string(const KernelSpec& spec) {
  std::ostringstream os;
  switch (spec.family) {
    case KernelFamily::kSquaredExponential:
      os << "se(l=" << spec.lengthscale << ")";
      break;
    case KernelFamily::kMatern:
      os << "matern(nu=" << spec.smoothness << ",l=" << spec.lengthscale << ")";
      break;
    case KernelFamily::kPolynomial:
      os << "poly(n=" << spec.degree << ",b=" << spec.offset
         << ",l=" << spec.lengthscale << ")";
      break;
    case KernelFamily::kLinear:
      os << "linear(l=" << spec.lengthscale << ")";
      break;
    case KernelFamily::kProduct: {
      os << "product(";
      for (std::size_t i = 0; i < spec.factors.size(); ++i) {
        if (i) os << " * ";
        os << kernel_to_string(spec.factors[i].spec) << "[";
        const auto& cs = spec.factors[i].coords;
        for (std::size_t j = 0; j < cs.size(); ++j) {
          if (j) os << ",";
          os << cs[j];
        }
        os << "]";
      }
      os << ")";
      break;
    }
  }
  return os.str();
}

}  // namespace gpmw
