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

#include "artshield/mimicry/mimicry.hpp"

#include <chrono>
#include <cmath>

#include "artshield/core/errors.hpp"
#include "artshield/protect/losses.hpp"

namespace artshield {
namespace {

std::string ReplaceAll(std::string text, std::string_view key,
                       std::string_view value) {
  std::size_t pos = 0;
  while ((pos = text.find(key, pos)) != std::string::npos) {
    text.replace(pos, key.size(), value);
    pos += value.size();
  }
  return text;
}

}  // namespace

std::string_view TrainScopeName(TrainScope scope) {
  return scope == TrainScope::kFull ? "full" : "selected";
}

TrainScope ParseTrainScope(std::string_view name) {
  if (name == "full") return TrainScope::kFull;
  if (name == "selected") return TrainScope::kSelected;
  throw ConfigError("unknown train scope: " + std::string(name));
}

const std::vector<std::string>& DefaultContentPrompts() {
  static const std::vector<std::string> kPrompts = {
      "A boy riding a bicycle on a sunny street",
      "A dog sitting under a tree in a park",
      "An old lady reading a newspaper on a bench",
  };
  return kPrompts;
}

void MimicryConfig::Validate() const {
  if (pseudo_token.empty()) throw ConfigError("pseudo_token must be set");
  if (prompts.empty()) throw ConfigError("prompts must be nonempty");
  if (generation_template.find("{token}") == std::string::npos ||
      instance_template.find("{token}") == std::string::npos) {
    throw ConfigError("templates must contain {token}");
  }
  if (finetune_steps < 0) throw ConfigError("finetune_steps must be >= 0");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
  if (eval_draws < 1) throw ConfigError("eval_draws must be >= 1");
  if (scope == TrainScope::kSelected && selected_layers.empty()) {
    throw ConfigError("selected scope needs selected_layers");
  }
}

std::string MimicryConfig::InstancePrompt() const {
  return ReplaceAll(instance_template, "{token}", pseudo_token);
}

std::string MimicryConfig::GenerationPrompt(std::string_view content) const {
  return ReplaceAll(ReplaceAll(generation_template, "{prompt}", content),
                    "{token}", pseudo_token);
}

void CheckFreshHandle(const Backbone& attacker,
                      const BackboneHandle& protector) {
  if (attacker.instance_id() == protector.instance_id) {
    throw ConfigError("attacker must not share the protector's backbone");
  }
}

double EvaluateInstanceLoss(const Backbone& backbone,
                            std::span<const ImageTensor> images,
                            std::string_view instance_prompt, std::uint64_t seed,
                            int draws) {
  if (images.empty()) throw ConfigError("no images to evaluate");
  const PromptEmbedding prompt = backbone.EmbedPrompt(instance_prompt);
  Rng rng(DeriveSeed(seed, "mimicry-eval"));
  double total = 0.0;
  for (const auto& img : images) {
    const LatentImage z0 = backbone.Encode(img);
    for (int k = 0; k < draws; ++k) {
      total += LdmLoss(backbone, z0, prompt, SampleNoiseDraw(backbone, rng), {})
                   .value;
    }
  }
  return total / (static_cast<double>(images.size()) * draws);
}

FinetuneResult Finetune(Backbone& backbone, std::span<const ImageTensor> images,
                        const MimicryConfig& config,
                        std::span<const ImageTensor> class_examples) {
  config.Validate();
  if (images.empty()) throw ConfigError("Finetune: no images given");
  if (config.lambda > 0.0 && class_examples.empty()) {
    throw ConfigError("Finetune: lambda > 0 needs class examples");
  }
  const auto start = std::chrono::steady_clock::now();
  FinetuneResult result;
  result.handle = config.scope == TrainScope::kFull
                      ? backbone.SetFullyTrainable()
                      : backbone.SetTrainable(config.selected_layers);
  const auto mask = backbone.TrainableParamMask();
  const std::string instance_text = config.InstancePrompt();
  const PromptEmbedding instance_prompt = backbone.EmbedPrompt(instance_text);
  const PromptEmbedding prior_prompt = backbone.EmbedPrompt(config.prior_prompt);
  result.initial_loss = EvaluateInstanceLoss(backbone, images, instance_text,
                                             config.seed, config.eval_draws);

  Rng rng(DeriveSeed(config.seed, "mimicry-train"));
  AdamOptimizer optimizer(config.learning_rate);
  const std::size_t n = images.size();
  for (int step = 0; step < config.finetune_steps; ++step) {
    GradientSet grads;
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const NoiseDraw d = SampleNoiseDraw(backbone, rng);
      const NoiseDraw pd = SampleNoiseDraw(backbone, rng);
      const ImageTensor* cls =
          class_examples.empty() ? nullptr
                                 : &class_examples[(step * n + i) %
                                                   class_examples.size()];
      DreamBoothLossResult r =
          DreamBoothLoss(backbone, images[i], cls, instance_prompt,
                         prior_prompt, config.lambda, d, pd, {.params = true});
      if (!std::isfinite(r.total)) {
        throw DivergenceError("fine-tuning diverged at step " +
                              std::to_string(step) + " (loss " +
                              std::to_string(r.total) + ")");
      }
      AccumulateGradients(grads, r.param_grads, 1.0 / n);
      loss += r.total / n;
    }
    optimizer.Step(backbone.params(), grads, mask);
    result.curve.push_back(loss);
  }
  result.final_loss = EvaluateInstanceLoss(backbone, images, instance_text,
                                           config.seed, config.eval_draws);
  if (!std::isfinite(result.final_loss)) {
    throw DivergenceError("fine-tuning produced a non-finite final loss");
  }
  result.handle = backbone.handle();
  result.wall_seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
  return result;
}

std::vector<ImageTensor> Generate(const Backbone& backbone,
                                  const MimicryConfig& config) {
  config.Validate();
  std::vector<ImageTensor> out(config.prompts.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < config.prompts.size(); ++i) {
    const PromptEmbedding prompt =
        backbone.EmbedPrompt(config.GenerationPrompt(config.prompts[i]));
    Rng rng(DeriveSeed(DeriveSeed(config.seed, "mimicry-generate"),
                       static_cast<std::uint64_t>(i)));
    ImageTensor img =
        QuantizeTo8Bit(backbone.Decode(SampleDdim(backbone, prompt, rng,
                                                  config.sampler)));
    img.provenance = Provenance::kGenerated;
    img.tag = config.prompts[i];
    out[i] = std::move(img);
  }
  return out;
}

}  // namespace artshield
