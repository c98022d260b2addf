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

#include "artshield/backend/noise_schedule.hpp"

#include <cmath>
#include <string>

#include "artshield/core/errors.hpp"

namespace artshield {

BetaSchedule ParseBetaSchedule(std::string_view name) {
  if (name == "linear") return BetaSchedule::kLinear;
  if (name == "scaled_linear") return BetaSchedule::kScaledLinear;
  throw ConfigError("unknown beta schedule '" + std::string(name) + "'");
}

NoiseSchedule NoiseSchedule::FromBetas(std::vector<double> betas) {
  if (betas.empty()) throw ConfigError("noise schedule needs >= 1 step");
  NoiseSchedule s;
  s.alphas_cumprod_.reserve(betas.size());
  double prod = 1.0;
  for (double b : betas) {
    if (!(b > 0.0 && b < 1.0)) {
      throw ConfigError("beta values must lie in (0, 1)");
    }
    prod *= 1.0 - b;
    s.alphas_cumprod_.push_back(prod);
  }
  s.betas_ = std::move(betas);
  return s;
}

NoiseSchedule NoiseSchedule::Make(BetaSchedule kind, int num_timesteps,
                                  double beta_start, double beta_end) {
  if (num_timesteps < 1) throw ConfigError("num_timesteps must be >= 1");
  std::vector<double> betas(num_timesteps);
  for (int i = 0; i < num_timesteps; ++i) {
    const double f =
        num_timesteps == 1 ? 0.0 : static_cast<double>(i) / (num_timesteps - 1);
    if (kind == BetaSchedule::kLinear) {
      betas[i] = beta_start + f * (beta_end - beta_start);
    } else {
      const double r =
          std::sqrt(beta_start) + f * (std::sqrt(beta_end) - std::sqrt(beta_start));
      betas[i] = r * r;
    }
  }
  return FromBetas(std::move(betas));
}

double NoiseSchedule::alpha_cumprod(int t) const {
  if (t < 0 || t >= num_timesteps()) {
    throw RangeError("timestep " + std::to_string(t) + " outside [0, " +
                     std::to_string(num_timesteps()) + ")");
  }
  return alphas_cumprod_[t];
}

}  // namespace artshield
