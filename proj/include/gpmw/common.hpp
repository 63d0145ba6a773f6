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

#ifndef GPMW_COMMON_HPP_
#define GPMW_COMMON_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gpmw {

// Error taxonomy. Everything a caller can mess up is an InputError or a
// ConfigError; NumericalError means a factorization or related numeric
// breakdown that jitter retries could not fix.
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ProtocolError : std::logic_error {
  using std::logic_error::logic_error;
};

// splitmix64 step; the stable mixing function behind all seed derivation.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derived seed for (base, repeat, stream). Streams are small integers; agent
// i uses stream = i, auxiliary streams use constants (see harness.cpp).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t repeat,
                                 std::uint64_t stream) {
  return mix64(mix64(mix64(base) ^ repeat) ^ stream);
}

// Seeded generator with explicit, platform-stable draw routines. The std
// distributions are implementation-defined, so we do not use them.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n).
  int uniform_index(int n) {
    int i = static_cast<int>(uniform01() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  // Standard normal via Box-Muller (no cached spare; two uniforms per draw).
  double normal() {
    double u1 = 1.0 - uniform01();  // (0, 1]
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

inline bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace gpmw

#endif  // GPMW_COMMON_HPP_
