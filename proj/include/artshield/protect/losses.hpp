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

#ifndef ARTSHIELD_PROTECT_LOSSES_HPP_
#define ARTSHIELD_PROTECT_LOSSES_HPP_

#include "artshield/backend/backbone.hpp"
#include "artshield/core/image.hpp"
#include "artshield/core/rng.hpp"

namespace artshield {

// One (t, eps) sample for the denoising objective.
struct NoiseDraw {
  int timestep = 0;
  LatentImage eps;
};

// t uniform over [0, T), eps standard normal.
NoiseDraw SampleNoiseDraw(const Backbone& backbone, Rng& rng);

struct LdmLossResult {
  // ||eps - eps_theta(z_t, t, c)||^2 averaged over latent elements.
  double value = 0.0;
  GradientSet param_grads;
  // d value / d z0, set when request.input.
  LatentImage z0_grad;
};

LdmLossResult LdmLoss(const Backbone& backbone, const LatentImage& z0,
                      const PromptEmbedding& prompt, const NoiseDraw& draw,
                      GradRequest request);

struct DreamBoothLossResult {
  double instance_term = 0.0;
  double prior_term = 0.0;
  // instance_term + lambda * prior_term
  double total = 0.0;
  GradientSet param_grads;
  // d total / d instance pixels, set when request.input.
  ImageTensor instance_grad;
};

// Instance denoising loss on `instance` with `instance_prompt` plus lambda
// times the prior-preservation loss on `class_example` with `prior_prompt`.
// The two terms use independent draws. Throws ConfigError when lambda > 0 and
// no class example is given.
DreamBoothLossResult DreamBoothLoss(const Backbone& backbone,
                                    const ImageTensor& instance,
                                    const ImageTensor* class_example,
                                    const PromptEmbedding& instance_prompt,
                                    const PromptEmbedding& prior_prompt,
                                    double lambda, const NoiseDraw& draw,
                                    const NoiseDraw& prior_draw,
                                    GradRequest request);

}  // namespace artshield

#endif  // ARTSHIELD_PROTECT_LOSSES_HPP_
