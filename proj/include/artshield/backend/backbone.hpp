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

#ifndef ARTSHIELD_BACKEND_BACKBONE_HPP_
#define ARTSHIELD_BACKEND_BACKBONE_HPP_

#include <cstdint>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "artshield/backend/layer_id.hpp"
#include "artshield/backend/noise_schedule.hpp"
#include "artshield/backend/params.hpp"
#include "artshield/backend/tokenizer.hpp"
#include "artshield/backend/types.hpp"
#include "artshield/core/image.hpp"

namespace artshield {

// Opaque per-call activations kept for the backward pass.
class ForwardCache {
 public:
  virtual ~ForwardCache() = default;
};

struct NoisePrediction {
  LatentImage noise;
  // One record per enumerated layer, in layer order, when capture was on.
  std::vector<AttentionRecord> attention;
  std::shared_ptr<const ForwardCache> cache;
};

struct GradRequest {
  // Gradients for the currently trainable parameters.
  bool params = false;
  // Gradient with respect to the noisy latent input.
  bool input = false;
};

struct BackwardResult {
  GradientSet params;
  LatentImage input;
};

// Snapshot of a backbone's identity and trainable state.
struct BackboneHandle {
  std::string identifier;
  std::uint64_t instance_id = 0;
  LatentGeometry latent_geometry;
  std::vector<CrossAttnLayerId> layer_ids;
  std::set<CrossAttnLayerId> trainable_mask;
  bool core_trainable = false;
};

// Uniform adapter over a latent diffusion model: autoencoder, noise
// schedule, text encoder and a denoiser with enumerable cross-attention
// layers. A backbone is used by one worker at a time.
class Backbone {
 public:
  virtual ~Backbone() = default;

  virtual std::string_view identifier() const = 0;
  virtual ImageGeometry image_geometry() const = 0;
  virtual LatentGeometry latent_geometry() const = 0;
  virtual int downsample_factor() const = 0;
  virtual const NoiseSchedule& schedule() const = 0;
  virtual const std::vector<CrossAttnLayerId>& layer_ids() const = 0;
  virtual const Tokenizer& tokenizer() const = 0;
  virtual int text_dim() const = 0;

  // Deterministic encoder (posterior mean). Throws DimensionError if the
  // image is not the backbone's input geometry.
  virtual LatentImage Encode(const ImageTensor& image) const = 0;
  virtual ImageTensor Decode(const LatentImage& latent) const = 0;
  // Vector-Jacobian product of Encode at `image`.
  virtual ImageTensor EncodeBackward(const ImageTensor& image,
                                     const LatentImage& grad_latent) const = 0;

  virtual PromptEmbedding EmbedPrompt(std::string_view text) const = 0;

  virtual bool supports_attention_capture() const { return true; }

  // eps_theta(z_t, t, c). With `capture`, attention maps of every layer are
  // returned; capturing never changes the prediction. `retain_cache` keeps
  // the activations needed by Backward.
  virtual NoisePrediction PredictNoise(const LatentImage& z_t, int t,
                                       const PromptEmbedding& c, bool capture,
                                       bool retain_cache = false) const = 0;

  virtual BackwardResult Backward(const NoisePrediction& forward,
                                  const LatentImage& grad_prediction,
                                  GradRequest request) const = 0;

  virtual ParamStore& params() = 0;
  virtual const ParamStore& params() const = 0;

  virtual std::unique_ptr<Backbone> Clone() const = 0;

  // Restricts training to `layers`. `include_core` additionally unfreezes
  // every non-attention parameter (full fine-tuning). Throws NotFoundError
  // for layers the backbone does not enumerate.
  BackboneHandle SetTrainable(std::span<const CrossAttnLayerId> layers,
                              bool include_core = false);
  // Every layer plus the core parameters.
  BackboneHandle SetFullyTrainable();

  const std::set<CrossAttnLayerId>& trainable_layers() const {
    return trainable_;
  }
  bool core_trainable() const { return core_trainable_; }
  // One flag per parameter entry.
  std::vector<bool> TrainableParamMask() const;
  bool IsTrainableOwner(int owner) const;

  BackboneHandle handle() const;
  // Unique per constructed or cloned object.
  std::uint64_t instance_id() const { return instance_id_; }

  // Throws NotFoundError.
  int LayerIndex(const CrossAttnLayerId& id) const;

 protected:
  Backbone();
  Backbone(const Backbone& other);
  Backbone& operator=(const Backbone&) = delete;

 private:
  std::uint64_t instance_id_;
  std::set<CrossAttnLayerId> trainable_;
  std::vector<bool> trainable_by_index_;
  bool core_trainable_ = false;
};

// z_t = sqrt(abar_t) z0 + sqrt(1 - abar_t) eps. Throws RangeError for t
// outside [0, T) and DimensionError when eps does not match z0.
LatentImage AddNoise(const NoiseSchedule& schedule, const LatentImage& z0,
                     int t, const LatentImage& eps);
// Same closed form with an explicit abar in [0, 1].
LatentImage AddNoiseAt(double alpha_bar, const LatentImage& z0,
                       const LatentImage& eps);

// Standard-normal latent of the given geometry.
class Rng;
LatentImage SampleNormalLatent(const LatentGeometry& g, Rng& rng,
                               double scale = 1.0);

}  // namespace artshield

#endif  // ARTSHIELD_BACKEND_BACKBONE_HPP_
