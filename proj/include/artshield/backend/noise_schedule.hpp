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

#ifndef ARTSHIELD_BACKEND_NOISE_SCHEDULE_HPP_
#define ARTSHIELD_BACKEND_NOISE_SCHEDULE_HPP_

#include <string_view>
#include <vector>

namespace artshield {

enum class BetaSchedule { kLinear, kScaledLinear };

BetaSchedule ParseBetaSchedule(std::string_view name);

class NoiseSchedule {
 public:
  // Validates every beta in (0, 1) and derives the cumulative products.
  static NoiseSchedule FromBetas(std::vector<double> betas);
  // Stable Diffusion defaults: scaled_linear, 1000 steps, 0.00085..0.012.
  static NoiseSchedule Make(BetaSchedule kind, int num_timesteps = 1000,
                            double beta_start = 0.00085,
                            double beta_end = 0.012);

  int num_timesteps() const { return static_cast<int>(betas_.size()); }
  const std::vector<double>& betas() const { return betas_; }
  const std::vector<double>& alphas_cumprod() const { return alphas_cumprod_; }
  // Throws RangeError unless 0 <= t < T.
  double alpha_cumprod(int t) const;

 private:
  std::vector<double> betas_;
  std::vector<double> alphas_cumprod_;
};

}  // namespace artshield

#endif  // ARTSHIELD_BACKEND_NOISE_SCHEDULE_HPP_
