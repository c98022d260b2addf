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

#include "artshield/protect/protect_engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include "artshield/core/errors.hpp"
#include "artshield/core/hash.hpp"
#include "artshield/io/image_io.hpp"
#include "artshield/protect/losses.hpp"

namespace artshield {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

ImageTensor Apply(const ImageTensor& clean, const Perturbation& p) {
  ImageTensor out = clean;
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += p.delta.data[i];
  out.provenance = Provenance::kProtected;
  return out;
}

double LInf(const Perturbation& p) {
  double m = 0.0;
  for (double v : p.delta.data) m = std::max(m, std::abs(v));
  return m;
}

// Restores parameters and the trainable mask when the protection job ends,
// including on exceptions.
class ModelRestorer {
 public:
  explicit ModelRestorer(Backbone& backbone)
      : backbone_(backbone),
        params_(backbone.params()),
        layers_(backbone.trainable_layers().begin(),
                backbone.trainable_layers().end()),
        core_(backbone.core_trainable()) {}
  ~ModelRestorer() {
    backbone_.params() = params_;
    backbone_.SetTrainable(layers_, core_);
  }
  ModelRestorer(const ModelRestorer&) = delete;
  ModelRestorer& operator=(const ModelRestorer&) = delete;

 private:
  Backbone& backbone_;
  ParamStore params_;
  std::vector<CrossAttnLayerId> layers_;
  bool core_;
};

}  // namespace

void ProtectConfig::Validate() const {
  if (!(budget >= 0.0 && budget <= 1.0)) {
    throw ConfigError("budget must lie in (0, 1]");
  }
  if (budget > 0.0 && !(step_size > 0.0 && step_size <= budget)) {
    throw ConfigError("step size must satisfy 0 < step <= budget");
  }
  if (outer_iters < 0 || inner_finetune_steps < 0 || pgd_steps_per_outer < 0) {
    throw ConfigError("iteration counts must be >= 0");
  }
  if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
  if (!(finetune_learning_rate > 0.0)) {
    throw ConfigError("fine-tune learning rate must be > 0");
  }
  if (eval_draws < 1) throw ConfigError("eval_draws must be >= 1");
  if (num_class_examples < 0) {
    throw ConfigError("num_class_examples must be >= 0");
  }
}

bool SatisfiesBudget(const Perturbation& p, const ImageTensor& clean,
                     double tol) {
  if (!p.delta.SameShape(clean)) return false;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const double d = p.delta.data[i];
    const double x = clean.data[i] + d;
    if (std::abs(d) > p.budget + tol || x < -tol || x > 1.0 + tol) return false;
  }
  return true;
}

PgdStepOutcome PgdAscentStep(Perturbation& delta, const ImageTensor& grad,
                             double step, const ImageTensor& clean) {
  CheckSameShape(delta.delta, grad, "PgdAscentStep");
  CheckSameShape(delta.delta, clean, "PgdAscentStep");
  for (double g : grad.data) {
    if (!std::isfinite(g)) return {false, "non-finite gradient; step skipped"};
  }
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double g = grad.data[i];
    const double sign = g > 0.0 ? 1.0 : (g < 0.0 ? -1.0 : 0.0);
    double d = std::clamp(delta.delta.data[i] + step * sign, -delta.budget,
                          delta.budget);
    const double c = clean.data[i];
    if (c + d > 1.0) d = 1.0 - c;
    if (c + d < 0.0) d = -c;
    delta.delta.data[i] = d;
  }
  return {};
}

ProtectResult Protect(std::span<const ImageTensor> images, Backbone& backbone,
                      const ProtectConfig& config,
                      std::span<const ImageTensor> class_examples) {
  if (images.empty()) throw ConfigError("Protect: no images given");
  config.Validate();
  const auto start = Clock::now();
  ProtectResult result;
  if (config.budget == 0.0 || config.outer_iters == 0) {
    if (config.budget == 0.0) {
      result.warnings.push_back("budget is 0; returning clean images");
    }
    for (const auto& img : images) {
      result.images.push_back(img);
      result.perturbations.push_back(
          {ImageTensor::Filled(img.height, img.width, img.channels, 0.0),
           config.budget});
    }
    return result;
  }
  if (config.selected_layers.empty()) {
    throw ConfigError("Protect: no cross-attention layers selected");
  }
  if (config.lambda > 0.0 && class_examples.empty()) {
    throw ConfigError("Protect: lambda > 0 needs class examples");
  }
  for (const auto& img : images) {
    for (double v : img.data) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw RangeError("Protect: image values must lie in [0, 1]");
      }
    }
  }

  ModelRestorer restorer(backbone);
  const ParamStore original_params = backbone.params();
  backbone.SetTrainable(config.selected_layers);
  const auto mask = backbone.TrainableParamMask();
  const PromptEmbedding instance_prompt =
      backbone.EmbedPrompt(config.instance_prompt);
  const PromptEmbedding prior_prompt = backbone.EmbedPrompt(config.prior_prompt);
  const std::size_t n = images.size();
  auto class_for = [&](std::size_t i) -> const ImageTensor* {
    return class_examples.empty() ? nullptr
                                  : &class_examples[i % class_examples.size()];
  };

  // Fixed draws so that logged adversarial losses are comparable over time.
  Rng eval_rng(DeriveSeed(config.seed, "protect-eval"));
  std::vector<std::vector<std::pair<NoiseDraw, NoiseDraw>>> eval_draws(n);
  for (auto& per_image : eval_draws) {
    for (int k = 0; k < config.eval_draws; ++k) {
      NoiseDraw a = SampleNoiseDraw(backbone, eval_rng);
      NoiseDraw b = SampleNoiseDraw(backbone, eval_rng);
      per_image.emplace_back(std::move(a), std::move(b));
    }
  }
  const double prior_weight = config.ascend_prior_term ? config.lambda : 0.0;

  std::vector<Perturbation> deltas;
  for (const auto& img : images) {
    deltas.push_back(
        {ImageTensor::Filled(img.height, img.width, img.channels, 0.0),
         config.budget});
  }
  auto adversarial_loss = [&] {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const ImageTensor x = Apply(images[i], deltas[i]);
      for (const auto& [d, pd] : eval_draws[i]) {
        total += DreamBoothLoss(backbone, x, class_for(i), instance_prompt,
                                prior_prompt, prior_weight, d, pd, {})
                     .total;
      }
    }
    return total / (static_cast<double>(n) * config.eval_draws);
  };
  auto original_adversarial_loss = [&] {
    ParamStore current = backbone.params();
    backbone.params() = original_params;
    const double loss = adversarial_loss();
    backbone.params() = std::move(current);
    return loss;
  };
  result.initial_adversarial_loss = adversarial_loss();

  Rng rng(DeriveSeed(config.seed, "protect"));
  AdamOptimizer optimizer(config.finetune_learning_rate);
  for (int outer = 0; outer < config.outer_iters; ++outer) {
    const auto iter_start = Clock::now();
    ProtectLogEntry entry;
    entry.outer = outer;

    for (int s = 0; s < config.inner_finetune_steps; ++s) {
      GradientSet grads;
      double loss = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const ImageTensor x = Apply(images[i], deltas[i]);
        const NoiseDraw d = SampleNoiseDraw(backbone, rng);
        const NoiseDraw pd = SampleNoiseDraw(backbone, rng);
        DreamBoothLossResult r =
            DreamBoothLoss(backbone, x, class_for(i), instance_prompt,
                           prior_prompt, config.lambda, d, pd, {.params = true});
        AccumulateGradients(grads, r.param_grads, 1.0 / n);
        loss += r.total / n;
      }
      optimizer.Step(backbone.params(), grads, mask);
      entry.finetune_loss = loss;
    }

    for (int p = 0; p < config.pgd_steps_per_outer; ++p) {
      for (std::size_t i = 0; i < n; ++i) {
        const ImageTensor x = Apply(images[i], deltas[i]);
        const NoiseDraw d = SampleNoiseDraw(backbone, rng);
        const NoiseDraw pd = SampleNoiseDraw(backbone, rng);
        // The prior term has no pixel gradient; only the instance term is
        // differentiated.
        DreamBoothLossResult r =
            DreamBoothLoss(backbone, x, nullptr, instance_prompt, prior_prompt,
                           0.0, d, pd, {.input = true});
        const PgdStepOutcome outcome =
            PgdAscentStep(deltas[i], r.instance_grad, config.step_size,
                          images[i]);
        if (!outcome.applied) {
          ++entry.skipped_pgd_steps;
          result.warnings.push_back("outer " + std::to_string(outer) +
                                    ", image " + std::to_string(i) + ": " +
                                    outcome.note);
        }
      }
    }

    entry.surrogate_loss = adversarial_loss();
    entry.adversarial_loss = original_adversarial_loss();
    for (const auto& d : deltas) entry.linf = std::max(entry.linf, LInf(d));
    entry.wall_seconds = Seconds(iter_start);
    result.log.push_back(entry);
  }

  for (std::size_t i = 0; i < n; ++i) {
    ImageTensor out = Apply(images[i], deltas[i]);
    out.tag = images[i].tag;
    result.images.push_back(std::move(out));
  }
  result.perturbations = std::move(deltas);
  result.wall_seconds = Seconds(start);
  return result;
}

std::vector<ImageTensor> GenerateClassExamples(
    const Backbone& original, std::string_view prior_prompt, int n,
    std::uint64_t seed, const SamplerOptions& sampler,
    const std::optional<std::filesystem::path>& cache_dir) {
  if (n < 0) throw RangeError("class example count must be >= 0");
  std::vector<ImageTensor> out;
  if (n == 0) return out;

  std::filesystem::path dir;
  if (cache_dir) {
    Fnv1a h;
    h.UpdateValue(original.params().Hash());
    h.Update(original.identifier());
    h.Update(prior_prompt);
    h.UpdateValue(n);
    h.UpdateValue(seed);
    h.UpdateValue(sampler.steps);
    h.UpdateValue(sampler.x0_clip);
    dir = *cache_dir / ("class-" + HexDigest(h.digest()));
    if (std::filesystem::exists(dir / "complete")) {
      for (int i = 0; i < n; ++i) {
        ImageTensor img = ReadImage(dir / ("class_" + std::to_string(i) + ".png"));
        img.provenance = Provenance::kGenerated;
        img.tag = std::string(prior_prompt);
        out.push_back(std::move(img));
      }
      return out;
    }
  }

  const PromptEmbedding prompt = original.EmbedPrompt(prior_prompt);
  for (int i = 0; i < n; ++i) {
    Rng rng(DeriveSeed(DeriveSeed(seed, "class-examples"),
                       static_cast<std::uint64_t>(i)));
    ImageTensor img =
        QuantizeTo8Bit(original.Decode(SampleDdim(original, prompt, rng, sampler)));
    img.provenance = Provenance::kGenerated;
    img.tag = std::string(prior_prompt);
    out.push_back(std::move(img));
  }
  if (cache_dir) {
    std::filesystem::create_directories(dir);
    for (int i = 0; i < n; ++i) {
      WritePng(out[i], dir / ("class_" + std::to_string(i) + ".png"));
    }
    std::ofstream(dir / "complete") << n << "\n";
  }
  return out;
}

ImageTensor QuantizeWithinBudget(const ImageTensor& protected_image,
                                 const ImageTensor& clean, double budget) {
  CheckSameShape(protected_image, clean, "QuantizeWithinBudget");
  ImageTensor out = protected_image;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double c = clean.data[i];
    const double target = std::clamp(out.data[i], 0.0, 1.0);
    // Nearest 8-bit level inside [c - budget, c + budget]; the clean value
    // itself is kept when no level fits.
    double lo = std::ceil(std::max(0.0, c - budget) * 255.0);
    double hi = std::floor(std::min(1.0, c + budget) * 255.0);
    if (c - lo / 255.0 > budget) lo += 1.0;
    if (hi / 255.0 - c > budget) hi -= 1.0;
    if (lo > hi) {
      out.data[i] = c;
      continue;
    }
    const double q = std::clamp(std::round(target * 255.0), lo, hi);
    out.data[i] = q / 255.0;
  }
  return out;
}

}  // namespace artshield
