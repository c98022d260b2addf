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

#ifndef ARTSHIELD_BACKEND_SAMPLER_HPP_
#define ARTSHIELD_BACKEND_SAMPLER_HPP_

#include <functional>
#include <vector>

#include "artshield/backend/backbone.hpp"
#include "artshield/core/rng.hpp"

namespace artshield {

struct SamplerOptions {
  int steps = 20;
  // Predicted clean latents are clamped to +-x0_clip before each update.
  double x0_clip = 3.0;
};

// Descending DDIM grid i * (T / steps), i = steps-1 .. 0.
std::vector<int> DdimTimesteps(int num_timesteps, int steps);

using StepObserver =
    std::function<void(int timestep, const NoisePrediction& prediction)>;

// Deterministic DDIM (eta = 0) from a standard-normal start drawn from `rng`.
// With `capture`, each step's attention maps reach `observer`.
LatentImage SampleDdim(const Backbone& backbone, const PromptEmbedding& prompt,
                       Rng& rng, const SamplerOptions& options,
                       bool capture = false,
                       const StepObserver& observer = {});

}  // namespace artshield

#endif  // ARTSHIELD_BACKEND_SAMPLER_HPP_
