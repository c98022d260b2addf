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

#include "artshield/backend/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "artshield/core/errors.hpp"

namespace artshield {

std::vector<int> DdimTimesteps(int num_timesteps, int steps) {
  if (steps < 1 || steps > num_timesteps) {
    throw RangeError("DDIM steps must lie in [1, T]");
  }
  const int ratio = num_timesteps / steps;
  std::vector<int> ts(steps);
  for (int i = 0; i < steps; ++i) ts[i] = (steps - 1 - i) * ratio;
  return ts;
}

LatentImage SampleDdim(const Backbone& backbone, const PromptEmbedding& prompt,
                       Rng& rng, const SamplerOptions& options, bool capture,
                       const StepObserver& observer) {
  const NoiseSchedule& schedule = backbone.schedule();
  const auto timesteps = DdimTimesteps(schedule.num_timesteps(), options.steps);
  LatentImage z = SampleNormalLatent(backbone.latent_geometry(), rng);
  for (std::size_t i = 0; i < timesteps.size(); ++i) {
    const int t = timesteps[i];
    const NoisePrediction pred = backbone.PredictNoise(z, t, prompt, capture);
    if (observer) observer(t, pred);
    const double a_t = schedule.alpha_cumprod(t);
    const double a_prev = i + 1 < timesteps.size()
                              ? schedule.alpha_cumprod(timesteps[i + 1])
                              : 1.0;
    const double sa = std::sqrt(a_t);
    const double sb = std::sqrt(1.0 - a_t);
    for (std::size_t k = 0; k < z.data.size(); ++k) {
      const double eps = pred.noise.data[k];
      double x0 = (z.data[k] - sb * eps) / sa;
      x0 = std::clamp(x0, -options.x0_clip, options.x0_clip);
      z.data[k] = std::sqrt(a_prev) * x0 + std::sqrt(1.0 - a_prev) * eps;
    }
  }
  return z;
}

}  // namespace artshield
