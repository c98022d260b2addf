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

#ifndef ARTSHIELD_PROTECT_PROTECT_ENGINE_HPP_
#define ARTSHIELD_PROTECT_PROTECT_ENGINE_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "artshield/backend/backbone.hpp"
#include "artshield/backend/sampler.hpp"
#include "artshield/core/image.hpp"
#include "artshield/core/rng.hpp"

namespace artshield {

struct ProtectConfig {
  // L-infinity budget on the [0, 1] pixel scale.
  double budget = 0.1;
  // Signed-gradient step; defaults to budget / 10.
  double step_size = 0.01;
  int outer_iters = 40;
  int inner_finetune_steps = 3;
  int pgd_steps_per_outer = 1;
  // Prior-preservation weight.
  double lambda = 1.0;
  std::vector<CrossAttnLayerId> selected_layers;
  std::string instance_prompt = "a painting in sks style";
  std::string prior_prompt = "a painting";
  std::uint64_t seed = kDefaultSeed;
  double finetune_learning_rate = 2e-3;
  int num_class_examples = 100;
  // Include the prior term in the reported adversarial objective.
  bool ascend_prior_term = true;
  // Fixed (t, eps) draws per image used to log the adversarial loss.
  int eval_draws = 8;

  // Throws ConfigError. A zero budget is accepted (Protect then returns the
  // clean images).
  void Validate() const;
};

struct Perturbation {
  ImageTensor delta;
  double budget = 0.0;
};

// ||delta||_inf <= budget + tol and clean + delta within [0, 1].
bool SatisfiesBudget(const Perturbation& p, const ImageTensor& clean,
                     double tol = 1e-12);

struct PgdStepOutcome {
  bool applied = true;
  std::string note;
};

// delta <- clip_valid(project_inf(delta + step * sign(grad))). A gradient
// with non-finite entries leaves delta untouched and reports why.
PgdStepOutcome PgdAscentStep(Perturbation& delta, const ImageTensor& grad,
                             double step, const ImageTensor& clean);

struct ProtectLogEntry {
  int outer = 0;
  double finetune_loss = 0.0;
  // Objective on the protected images under the original weights.
  double adversarial_loss = 0.0;
  // Same objective under the current fine-tuned surrogate.
  double surrogate_loss = 0.0;
  double linf = 0.0;
  double wall_seconds = 0.0;
  int skipped_pgd_steps = 0;
};

struct ProtectResult {
  std::vector<ImageTensor> images;
  std::vector<Perturbation> perturbations;
  // One entry per outer iteration.
  std::vector<ProtectLogEntry> log;
  // Adversarial loss before the first iteration, same fixed draws as log.
  double initial_adversarial_loss = 0.0;
  std::vector<std::string> warnings;
  double wall_seconds = 0.0;
};

// Alternates fine-tuning the selected cross-attention layers on the current
// protected images with signed-gradient ascent on per-image perturbations.
// Model edits are undone before returning. Throws ConfigError for an empty
// image list, empty layer selection, or missing class examples when
// lambda > 0.
ProtectResult Protect(std::span<const ImageTensor> images, Backbone& backbone,
                      const ProtectConfig& config,
                      std::span<const ImageTensor> class_examples);

// Samples `n` images from `original` with `prior_prompt`, quantised to 8 bit.
// With a cache directory the images are stored as PNG under a key derived
// from the backbone weights, prompt, count and seed, and reused on later
// calls.
std::vector<ImageTensor> GenerateClassExamples(
    const Backbone& original, std::string_view prior_prompt, int n,
    std::uint64_t seed, const SamplerOptions& sampler = {},
    const std::optional<std::filesystem::path>& cache_dir = std::nullopt);

// Rounds protected pixels to the 8-bit grid while keeping every pixel within
// `budget` of `clean` (clean is assumed 8-bit already).
ImageTensor QuantizeWithinBudget(const ImageTensor& protected_image,
                                 const ImageTensor& clean, double budget);

}  // namespace artshield

#endif  // ARTSHIELD_PROTECT_PROTECT_ENGINE_HPP_
