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

#ifndef ARTSHIELD_BACKEND_TOY_BACKBONE_HPP_
#define ARTSHIELD_BACKEND_TOY_BACKBONE_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "artshield/backend/backbone.hpp"

namespace artshield {

enum class ToyEncoderKind {
  // 8x8x3 pixel patches projected to 4 latent channels; first three rows are
  // per-channel means, the fourth a fixed texture direction.
  kPatch,
  // Latent equals the image (channel-first), factor 1.
  kIdentity,
};

struct ToyBackboneConfig {
  std::string identifier = "toy";
  ToyEncoderKind encoder = ToyEncoderKind::kPatch;
  int image_size = 64;
  int image_channels = 3;
  int downsample = 8;
  int latent_channels = 4;
  double latent_scale = 0.18215;
  // Reference 16-layer layout instead of one layer per level.
  bool paper_shape = false;
  int hidden = 32;
  int heads = 2;
  int head_dim = 16;
  int text_dim = 32;
  int max_tokens = 77;
  int vocab_size = 1024;
  int time_dim = 32;
  BetaSchedule beta_schedule = BetaSchedule::kScaledLinear;
  int num_timesteps = 1000;
  std::uint64_t seed = 9222;

  static ToyBackboneConfig Compact();
  static ToyBackboneConfig PaperShape();
  static ToyBackboneConfig Identity();
};

// Miniature text-conditioned denoiser. Per level: a tanh residual block
// followed by a multi-head cross-attention layer reading the prompt
// embedding; a learned positional embedding gives the model spatial memory.
// Gradients are hand-derived.
class ToyBackbone : public Backbone {
 public:
  explicit ToyBackbone(ToyBackboneConfig config);

  const ToyBackboneConfig& config() const { return config_; }

  std::string_view identifier() const override { return config_.identifier; }
  ImageGeometry image_geometry() const override;
  LatentGeometry latent_geometry() const override { return latent_; }
  int downsample_factor() const override { return config_.downsample; }
  const NoiseSchedule& schedule() const override { return schedule_; }
  const std::vector<CrossAttnLayerId>& layer_ids() const override {
    return layers_;
  }
  const Tokenizer& tokenizer() const override { return tokenizer_; }
  int text_dim() const override { return config_.text_dim; }

  LatentImage Encode(const ImageTensor& image) const override;
  ImageTensor Decode(const LatentImage& latent) const override;
  ImageTensor EncodeBackward(const ImageTensor& image,
                             const LatentImage& grad_latent) const override;

  PromptEmbedding EmbedPrompt(std::string_view text) const override;

  NoisePrediction PredictNoise(const LatentImage& z_t, int t,
                               const PromptEmbedding& c, bool capture,
                               bool retain_cache = false) const override;
  BackwardResult Backward(const NoisePrediction& forward,
                          const LatentImage& grad_prediction,
                          GradRequest request) const override;

  ParamStore& params() override { return params_; }
  const ParamStore& params() const override { return params_; }

  std::unique_ptr<Backbone> Clone() const override;

  // Sinusoidal timestep features, length time_dim.
  Eigen::RowVectorXd TimeFeatures(int t) const;

 private:
  struct LayerParams {
    int res_w1, res_b1, res_w2;
    int to_q, to_k, to_v, to_out_w, to_out_b;
  };
  class Cache;

  void InitializeParameters();
  void CheckImage(const ImageTensor& image) const;

  ToyBackboneConfig config_;
  LatentGeometry latent_;
  NoiseSchedule schedule_;
  Tokenizer tokenizer_;
  std::vector<CrossAttnLayerId> layers_;
  ParamStore params_;
  int encoder_, token_table_;
  int pos_, in_w_, in_b_, time_w_, out_w_, out_b_;
  std::vector<LayerParams> layer_params_;
};

// Directory holding the shipped toy weights: $ARTSHIELD_DATA_DIR if set,
// otherwise the source tree's data/ directory.
std::filesystem::path DataDirectory();

// "toy", "toy-paper" or "toy-identity". Shipped weights are loaded when
// present under DataDirectory(). Throws NotFoundError for unknown ids.
std::unique_ptr<Backbone> MakeBackbone(std::string_view identifier);
std::vector<std::string> KnownBackbones();
std::filesystem::path WeightsPath(std::string_view identifier);

}  // namespace artshield

#endif  // ARTSHIELD_BACKEND_TOY_BACKBONE_HPP_
