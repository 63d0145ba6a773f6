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

#ifndef GPMW_KERNEL_HPP_
#define GPMW_KERNEL_HPP_

#include <span>
#include <string>
#include <vector>

#include "gpmw/common.hpp"

namespace gpmw {

enum class KernelFamily {
  kSquaredExponential,
  kMatern,
  kPolynomial,
  kLinear,
  kProduct,
};

struct KernelFactor;

// Declarative kernel description. Hyperparameters are plain fields; which
// ones apply depends on the family. Product-composite kernels hold an
// ordered list of (factor spec, coordinate selector) pairs; each factor
// sees only its selected coordinates of the joint input.
struct KernelSpec {
  KernelFamily family = KernelFamily::kSquaredExponential;
  double lengthscale = 1.0;  // l  (all families except product)
  int degree = 1;            // n  (polynomial)
  double offset = 0.0;       // b  (polynomial)
  double smoothness = 2.5;   // nu in {1/2, 3/2, 5/2}  (Matern)
  std::vector<KernelFactor> factors;

  static KernelSpec se(double l);
  static KernelSpec matern(double nu, double l);
  static KernelSpec polynomial(int n, double b, double l);
  static KernelSpec linear(double l);
  static KernelSpec product(std::vector<KernelFactor> factors);
};

struct KernelFactor {
  KernelSpec spec;
  std::vector<int> coords;  // indices into the joint input
};

// Throws ConfigError on invalid hyperparameters (nonpositive lengthscale,
// unsupported smoothness, empty factor list, bad selectors, ...).
void validate_kernel(const KernelSpec& spec);

// k(a, a') per the spec'd family formulas. Product kernels multiply the
// factor evaluations on their selected coordinates. Throws InputError on
// dimension mismatch or non-finite coordinates.
double eval_kernel(const KernelSpec& spec, std::span<const double> a,
                   std::span<const double> b);

std::string kernel_to_string(const KernelSpec& spec);

}  // namespace gpmw

#endif  // GPMW_KERNEL_HPP_
