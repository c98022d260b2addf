// Copyright 2026 The artshield Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ARTSHIELD_CORE_RNG_HPP_
#define ARTSHIELD_CORE_RNG_HPP_

#include <cstdint>
#include <random>
#include <string_view>

namespace artshield {

inline constexpr std::uint64_t kDefaultSeed = 9222;

// Derives an independent stream seed from a parent seed and a label.
std::uint64_t DeriveSeed(std::uint64_t parent, std::string_view label);
std::uint64_t DeriveSeed(std::uint64_t parent, std::uint64_t index);

// Seeded generator with a portable normal sampler. std::normal_distribution
// is implementation-defined, so normals use Box-Muller over mt19937_64 to
// keep streams identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double Uniform();
  // Uniform integer in [0, n).
  int UniformInt(int n);
  double Normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace artshield

#endif  // ARTSHIELD_CORE_RNG_HPP_
