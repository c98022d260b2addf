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

#ifndef ARTSHIELD_MIMICRY_MIMICRY_HPP_
#define ARTSHIELD_MIMICRY_MIMICRY_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "artshield/backend/backbone.hpp"
#include "artshield/backend/sampler.hpp"
#include "artshield/core/image.hpp"
#include "artshield/core/rng.hpp"

namespace artshield {

enum class TrainScope { kFull, kSelected };

std::string_view TrainScopeName(TrainScope scope);
TrainScope ParseTrainScope(std::string_view name);

// Content prompts used for attacker generations by default.
const std::vector<std::string>& DefaultContentPrompts();

struct MimicryConfig {
  std::string pseudo_token = "sks";
  int finetune_steps = 300;
  double learning_rate = 5e-3;
  std::vector<std::string> prompts = DefaultContentPrompts();
  std::uint64_t seed = kDefaultSeed;
  double lambda = 1.0;
  std::string prior_prompt = "a painting";
  // "{token}" is replaced by the pseudo-token, "{prompt}" by a content prompt.
  std::string instance_template = "a painting in {token} style";
  std::string generation_template = "{prompt} in {token} style";
  TrainScope scope = TrainScope::kFull;
  // Used when scope is kSelected.
  std::vector<CrossAttnLayerId> selected_layers;
  // Fixed (t, eps) draws per image for the reported losses.
  int eval_draws = 8;
  SamplerOptions sampler;

  // Throws ConfigError.
  void Validate() const;
  std::string InstancePrompt() const;
  std::string GenerationPrompt(std::string_view content) const;
};

struct FinetuneResult {
  BackboneHandle handle;
  // Mean training loss per step.
  std::vector<double> curve;
  // Instance-term loss over fixed draws, before and after training.
  double initial_loss = 0.0;
  double final_loss = 0.0;
  double wall_seconds = 0.0;
};

// Throws ConfigError when `attacker` is the protector's backbone instance.
void CheckFreshHandle(const Backbone& attacker, const BackboneHandle& protector);

// Fine-tunes `backbone` in place. Throws DivergenceError on a non-finite loss.
FinetuneResult Finetune(Backbone& backbone, std::span<const ImageTensor> images,
                        const MimicryConfig& config,
                        std::span<const ImageTensor> class_examples);

// Instance-term loss of `images` under fixed draws derived from `seed`.
double EvaluateInstanceLoss(const Backbone& backbone,
                            std::span<const ImageTensor> images,
                            std::string_view instance_prompt, std::uint64_t seed,
                            int draws);

// One image per prompt; each is tagged with its content prompt.
std::vector<ImageTensor> Generate(const Backbone& backbone,
                                  const MimicryConfig& config);

}  // namespace artshield

#endif  // ARTSHIELD_MIMICRY_MIMICRY_HPP_
