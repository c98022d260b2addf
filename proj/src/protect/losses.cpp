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

#include "artshield/protect/losses.hpp"

#include <cmath>

#include "artshield/core/errors.hpp"

namespace artshield {

NoiseDraw SampleNoiseDraw(const Backbone& backbone, Rng& rng) {
  NoiseDraw d;
  d.timestep = rng.UniformInt(backbone.schedule().num_timesteps());
  d.eps = SampleNormalLatent(backbone.latent_geometry(), rng);
  return d;
}

LdmLossResult LdmLoss(const Backbone& backbone, const LatentImage& z0,
                      const PromptEmbedding& prompt, const NoiseDraw& draw,
                      GradRequest request) {
  const LatentImage zt = AddNoise(backbone.schedule(), z0, draw.timestep,
                                  draw.eps);
  const bool need_grad = request.params || request.input;
  const NoisePrediction pred =
      backbone.PredictNoise(zt, draw.timestep, prompt, false, need_grad);
  const double n = static_cast<double>(zt.data.size());
  LdmLossResult out;
  LatentImage grad = LatentImage::Zeros(zt.geometry, zt.scale);
  for (std::size_t i = 0; i < zt.data.size(); ++i) {
    const double d = pred.noise.data[i] - draw.eps.data[i];
    out.value += d * d;
    grad.data[i] = 2.0 * d / n;
  }
  out.value /= n;
  if (!need_grad) return out;
  BackwardResult back = backbone.Backward(pred, grad, request);
  out.param_grads = std::move(back.params);
  if (request.input) {
    const double a = std::sqrt(backbone.schedule().alpha_cumprod(draw.timestep));
    out.z0_grad = std::move(back.input);
    for (double& g : out.z0_grad.data) g *= a;
  }
  return out;
}

DreamBoothLossResult DreamBoothLoss(const Backbone& backbone,
                                    const ImageTensor& instance,
                                    const ImageTensor* class_example,
                                    const PromptEmbedding& instance_prompt,
                                    const PromptEmbedding& prior_prompt,
                                    double lambda, const NoiseDraw& draw,
                                    const NoiseDraw& prior_draw,
                                    GradRequest request) {
  if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
  if (lambda > 0.0 && class_example == nullptr) {
    throw ConfigError("prior-preservation term needs class examples "
                      "(lambda > 0)");
  }
  DreamBoothLossResult out;
  LdmLossResult inst = LdmLoss(backbone, backbone.Encode(instance),
                               instance_prompt, draw, request);
  out.instance_term = inst.value;
  out.param_grads = std::move(inst.param_grads);
  if (request.input) {
    out.instance_grad = backbone.EncodeBackward(instance, inst.z0_grad);
  }
  if (lambda > 0.0) {
    // The class example does not depend on the instance pixels.
    LdmLossResult prior =
        LdmLoss(backbone, backbone.Encode(*class_example), prior_prompt,
                prior_draw, GradRequest{.params = request.params});
    out.prior_term = prior.value;
    if (request.params) {
      AccumulateGradients(out.param_grads, prior.param_grads, lambda);
    }
    out.total = out.instance_term + lambda * out.prior_term;
  } else {
    out.total = out.instance_term;
  }
  return out;
}

}  // namespace artshield
