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

#include "artshield/backend/toy_backbone.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "artshield/core/errors.hpp"
#include "artshield/core/rng.hpp"
#include "artshield/kernels/kernels.hpp"

#ifndef ARTSHIELD_DEFAULT_DATA_DIR
#define ARTSHIELD_DEFAULT_DATA_DIR "data"
#endif

namespace artshield {
namespace {

RowMatrix RandomMatrix(Rng& rng, int rows, int cols, double stddev) {
  RowMatrix m(rows, cols);
  for (int i = 0; i < m.size(); ++i) m.data()[i] = stddev * rng.Normal();
  return m;
}

// Rows [0, min(channels, latent)) average one colour channel over the patch;
// remaining rows are random directions orthonormalised against the others.
RowMatrix PatchProjection(Rng& rng, int latent_channels, int factor,
                          int channels) {
  const int dim = factor * factor * channels;
  RowMatrix e = RowMatrix::Zero(latent_channels, dim);
  const int mean_rows = std::min(channels, latent_channels);
  const double w = 1.0 / factor;  // unit norm over factor^2 entries
  for (int r = 0; r < mean_rows; ++r) {
    for (int k = r; k < dim; k += channels) e(r, k) = w;
  }
  for (int r = mean_rows; r < latent_channels; ++r) {
    Eigen::RowVectorXd v(dim);
    for (int k = 0; k < dim; ++k) v(k) = rng.Normal();
    for (int q = 0; q < r; ++q) v -= v.dot(e.row(q)) * e.row(q);
    e.row(r) = v / v.norm();
  }
  return e;
}

RowMatrix LatentToRows(const LatentImage& z) {
  const int p = z.geometry.positions();
  RowMatrix m(p, z.geometry.channels);
  for (int c = 0; c < z.geometry.channels; ++c) {
    for (int i = 0; i < p; ++i) m(i, c) = z.data[c * p + i];
  }
  return m;
}

LatentImage RowsToLatent(const RowMatrix& m, const LatentGeometry& g,
                         double scale) {
  LatentImage z = LatentImage::Zeros(g, scale);
  const int p = g.positions();
  for (int c = 0; c < g.channels; ++c) {
    for (int i = 0; i < p; ++i) z.data[c * p + i] = m(i, c);
  }
  return z;
}

}  // namespace

class ToyBackbone::Cache : public ForwardCache {
 public:
  struct Layer {
    RowMatrix x_in, g, x_res, q, k, v, o;
    std::vector<RowMatrix> attn;
  };
  RowMatrix z;
  Eigen::RowVectorXd temb;
  RowMatrix context;
  std::vector<Layer> layers;
  RowMatrix x_final;
};

ToyBackboneConfig ToyBackboneConfig::Compact() { return ToyBackboneConfig{}; }

ToyBackboneConfig ToyBackboneConfig::PaperShape() {
  ToyBackboneConfig c;
  c.identifier = "toy-paper";
  c.paper_shape = true;
  return c;
}

ToyBackboneConfig ToyBackboneConfig::Identity() {
  ToyBackboneConfig c;
  c.identifier = "toy-identity";
  c.encoder = ToyEncoderKind::kIdentity;
  c.image_size = 8;
  c.downsample = 1;
  c.latent_channels = 3;
  c.latent_scale = 1.0;
  return c;
}

ToyBackbone::ToyBackbone(ToyBackboneConfig config)
    : config_(std::move(config)),
      schedule_(NoiseSchedule::Make(config_.beta_schedule,
                                    config_.num_timesteps)),
      tokenizer_(config_.vocab_size, config_.max_tokens) {
  if (config_.downsample < 1 || config_.image_size % config_.downsample != 0) {
    throw ConfigError("toy backbone: image size must be a multiple of the "
                      "downsampling factor");
  }
  if (config_.encoder == ToyEncoderKind::kIdentity &&
      (config_.downsample != 1 ||
       config_.latent_channels != config_.image_channels)) {
    throw ConfigError("identity encoder needs factor 1 and equal channels");
  }
  if (config_.time_dim % 2 != 0) throw ConfigError("time_dim must be even");
  const int side = config_.image_size / config_.downsample;
  latent_ = LatentGeometry{config_.latent_channels, side, side};
  layers_ = config_.paper_shape ? ReferenceLayerLayout() : CompactLayerLayout();
  InitializeParameters();
  SetTrainable({});
}

void ToyBackbone::InitializeParameters() {
  Rng rng(DeriveSeed(config_.seed, "toy-backbone-weights"));
  const int f = config_.downsample;
  const int d = config_.hidden;
  const int hd = config_.heads * config_.head_dim;
  const int dt = config_.text_dim;
  const int cl = config_.latent_channels;

  RowMatrix e =
      config_.encoder == ToyEncoderKind::kIdentity
          ? RowMatrix(RowMatrix::Identity(cl, cl))
          : PatchProjection(rng, cl, f, config_.image_channels);
  encoder_ = params_.Add("encoder.proj", kFrozenOwner, std::move(e));
  token_table_ = params_.Add("text.token_embedding", kFrozenOwner,
                             RandomMatrix(rng, config_.vocab_size, dt, 1.0));

  pos_ = params_.Add("unet.pos_embedding", kCoreOwner,
                     RandomMatrix(rng, latent_.positions(), d, 0.1));
  in_w_ = params_.Add("unet.conv_in.weight", kCoreOwner,
                      RandomMatrix(rng, cl, d, 1.0 / std::sqrt(cl)));
  in_b_ = params_.Add("unet.conv_in.bias", kCoreOwner, RowMatrix::Zero(1, d));
  time_w_ = params_.Add(
      "unet.time_embedding.weight", kCoreOwner,
      RandomMatrix(rng, config_.time_dim, d, 0.1 / std::sqrt(config_.time_dim)));

  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const std::string name = layers_[i].canonical_name();
    const int owner = static_cast<int>(i);
    LayerParams lp{};
    lp.res_w1 = params_.Add(name + ".resnet.w1", kCoreOwner,
                            RandomMatrix(rng, d, d, 1.0 / std::sqrt(d)));
    lp.res_b1 = params_.Add(name + ".resnet.b1", kCoreOwner,
                            RowMatrix::Zero(1, d));
    lp.res_w2 = params_.Add(name + ".resnet.w2", kCoreOwner,
                            RandomMatrix(rng, d, d, 0.1 / std::sqrt(d)));
    lp.to_q = params_.Add(name + ".attn2.to_q", owner,
                          RandomMatrix(rng, d, hd, 1.0 / std::sqrt(d)));
    lp.to_k = params_.Add(name + ".attn2.to_k", owner,
                          RandomMatrix(rng, dt, hd, 1.0 / std::sqrt(dt)));
    lp.to_v = params_.Add(name + ".attn2.to_v", owner,
                          RandomMatrix(rng, dt, hd, 1.0 / std::sqrt(dt)));
    lp.to_out_w = params_.Add(name + ".attn2.to_out.weight", owner,
                              RandomMatrix(rng, hd, d, 0.3 / std::sqrt(hd)));
    lp.to_out_b = params_.Add(name + ".attn2.to_out.bias", owner,
                              RowMatrix::Zero(1, d));
    layer_params_.push_back(lp);
  }
  out_w_ = params_.Add("unet.conv_out.weight", kCoreOwner,
                       RandomMatrix(rng, d, cl, 0.5 / std::sqrt(d)));
  out_b_ = params_.Add("unet.conv_out.bias", kCoreOwner, RowMatrix::Zero(1, cl));
}

ImageGeometry ToyBackbone::image_geometry() const {
  return {config_.image_size, config_.image_size, config_.image_channels};
}

void ToyBackbone::CheckImage(const ImageTensor& image) const {
  const int f = config_.downsample;
  if (image.height % f != 0 || image.width % f != 0) {
    throw DimensionError("image " + image.ShapeString() +
                         ": height and width must be divisible by " +
                         std::to_string(f));
  }
  if (image.height != config_.image_size || image.width != config_.image_size ||
      image.channels != config_.image_channels) {
    throw DimensionError("image " + image.ShapeString() + " does not match " +
                         std::string(identifier()) + " input " +
                         std::to_string(config_.image_size) + "x" +
                         std::to_string(config_.image_size) + "x" +
                         std::to_string(config_.image_channels));
  }
}

LatentImage ToyBackbone::Encode(const ImageTensor& image) const {
  CheckImage(image);
  const RowMatrix& e = params_.value(encoder_);
  const int f = config_.downsample;
  const int c_img = config_.image_channels;
  LatentImage z = LatentImage::Zeros(latent_, config_.latent_scale);
  const int p = latent_.positions();
  Eigen::VectorXd v(f * f * c_img);
  for (int py = 0; py < latent_.height; ++py) {
    for (int px = 0; px < latent_.width; ++px) {
      int k = 0;
      for (int dy = 0; dy < f; ++dy) {
        for (int dx = 0; dx < f; ++dx) {
          for (int c = 0; c < c_img; ++c) {
            v(k++) = 2.0 * image.at(py * f + dy, px * f + dx, c) - 1.0;
          }
        }
      }
      const Eigen::VectorXd proj = e * v;
      for (int cl = 0; cl < latent_.channels; ++cl) {
        z.data[cl * p + py * latent_.width + px] =
            config_.latent_scale * proj(cl);
      }
    }
  }
  return z;
}

ImageTensor ToyBackbone::Decode(const LatentImage& latent) const {
  if (!(latent.geometry == latent_)) {
    throw DimensionError("Decode: latent geometry mismatch");
  }
  const RowMatrix& e = params_.value(encoder_);
  const int f = config_.downsample;
  const int c_img = config_.image_channels;
  const int p = latent_.positions();
  ImageTensor img = ImageTensor::Filled(config_.image_size, config_.image_size,
                                        c_img, 0.0, Provenance::kGenerated);
  Eigen::VectorXd zc(latent_.channels);
  for (int py = 0; py < latent_.height; ++py) {
    for (int px = 0; px < latent_.width; ++px) {
      for (int cl = 0; cl < latent_.channels; ++cl) {
        zc(cl) = latent.data[cl * p + py * latent_.width + px] /
                 config_.latent_scale;
      }
      const Eigen::VectorXd v = e.transpose() * zc;
      int k = 0;
      for (int dy = 0; dy < f; ++dy) {
        for (int dx = 0; dx < f; ++dx) {
          for (int c = 0; c < c_img; ++c) {
            img.at(py * f + dy, px * f + dx, c) =
                std::clamp((v(k++) + 1.0) * 0.5, 0.0, 1.0);
          }
        }
      }
    }
  }
  return img;
}

ImageTensor ToyBackbone::EncodeBackward(const ImageTensor& image,
                                        const LatentImage& grad_latent) const {
  CheckImage(image);
  if (!(grad_latent.geometry == latent_)) {
    throw DimensionError("EncodeBackward: latent geometry mismatch");
  }
  const RowMatrix& e = params_.value(encoder_);
  const int f = config_.downsample;
  const int c_img = config_.image_channels;
  const int p = latent_.positions();
  ImageTensor grad = ImageTensor::Filled(image.height, image.width, c_img, 0.0);
  Eigen::VectorXd g(latent_.channels);
  for (int py = 0; py < latent_.height; ++py) {
    for (int px = 0; px < latent_.width; ++px) {
      for (int cl = 0; cl < latent_.channels; ++cl) {
        g(cl) = grad_latent.data[cl * p + py * latent_.width + px];
      }
      const Eigen::VectorXd v =
          (2.0 * config_.latent_scale) * (e.transpose() * g);
      int k = 0;
      for (int dy = 0; dy < f; ++dy) {
        for (int dx = 0; dx < f; ++dx) {
          for (int c = 0; c < c_img; ++c) {
            grad.at(py * f + dy, px * f + dx, c) = v(k++);
          }
        }
      }
    }
  }
  return grad;
}

PromptEmbedding ToyBackbone::EmbedPrompt(std::string_view text) const {
  const Tokenizer::Encoding enc = tokenizer_.Encode(text);
  const RowMatrix& table = params_.value(token_table_);
  const int dt = config_.text_dim;
  PromptEmbedding out;
  out.text = std::string(text);
  out.tokens = enc.ids;
  out.length = enc.length;
  out.embedding.resize(config_.max_tokens, dt);
  for (int j = 0; j < config_.max_tokens; ++j) {
    out.embedding.row(j) = table.row(enc.ids[j]);
    for (int i = 0; i < dt / 2; ++i) {
      const double freq = std::exp(-std::log(100.0) * i / (dt / 2));
      out.embedding(j, i) += 0.1 * std::sin(j * freq);
      out.embedding(j, dt / 2 + i) += 0.1 * std::cos(j * freq);
    }
  }
  return out;
}

Eigen::RowVectorXd ToyBackbone::TimeFeatures(int t) const {
  const int half = config_.time_dim / 2;
  Eigen::RowVectorXd f(config_.time_dim);
  for (int i = 0; i < half; ++i) {
    const double freq = std::exp(-std::log(10000.0) * i / half);
    f(i) = std::sin(t * freq);
    f(half + i) = std::cos(t * freq);
  }
  return f;
}

NoisePrediction ToyBackbone::PredictNoise(const LatentImage& z_t, int t,
                                          const PromptEmbedding& c,
                                          bool capture,
                                          bool retain_cache) const {
  if (!(z_t.geometry == latent_) ||
      static_cast<int>(z_t.data.size()) != latent_.size()) {
    throw DimensionError("PredictNoise: latent geometry mismatch");
  }
  if (c.embedding.rows() != config_.max_tokens ||
      c.embedding.cols() != config_.text_dim) {
    throw DimensionError("PredictNoise: prompt embedding must be " +
                         std::to_string(config_.max_tokens) + "x" +
                         std::to_string(config_.text_dim));
  }
  schedule_.alpha_cumprod(t);  // range check
  if (capture && !supports_attention_capture()) {
    throw UnsupportedError(std::string(identifier()) +
                           ": attention capture is not instrumented");
  }

  const int heads = config_.heads;
  const int dh = config_.head_dim;
  const int tokens = config_.max_tokens;
  const int positions = latent_.positions();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  auto cache = std::make_shared<Cache>();
  cache->z = LatentToRows(z_t);
  cache->temb = TimeFeatures(t);
  cache->context = c.embedding;

  RowMatrix x = cache->z * params_.value(in_w_);
  x.rowwise() += params_.value(in_b_).row(0);
  x += params_.value(pos_);
  x.rowwise() += (cache->temb * params_.value(time_w_)).row(0);

  NoisePrediction out;
  cache->layers.resize(layers_.size());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const LayerParams& lp = layer_params_[l];
    Cache::Layer& lc = cache->layers[l];
    lc.x_in = x;
    RowMatrix u = x * params_.value(lp.res_w1);
    u.rowwise() += params_.value(lp.res_b1).row(0);
    lc.g = u.array().tanh().matrix();
    lc.x_res = x + lc.g * params_.value(lp.res_w2);

    lc.q = lc.x_res * params_.value(lp.to_q);
    lc.k = cache->context * params_.value(lp.to_k);
    lc.v = cache->context * params_.value(lp.to_v);
    lc.o = RowMatrix::Zero(positions, heads * dh);
    lc.attn.resize(heads);
    for (int h = 0; h < heads; ++h) {
      RowMatrix s = scale * (lc.q.middleCols(h * dh, dh) *
                             lc.k.middleCols(h * dh, dh).transpose());
      kernels::SoftmaxRows(std::span<double>(s.data(), s.size()), positions,
                           tokens);
      lc.o.middleCols(h * dh, dh) = s * lc.v.middleCols(h * dh, dh);
      lc.attn[h] = std::move(s);
    }
    x = lc.x_res + lc.o * params_.value(lp.to_out_w);
    x.rowwise() += params_.value(lp.to_out_b).row(0);

    if (capture) {
      AttentionRecord rec;
      rec.layer = layers_[l];
      rec.heads = heads;
      rec.queries = positions;
      rec.tokens = tokens;
      rec.map.resize(static_cast<std::size_t>(heads) * positions * tokens);
      for (int h = 0; h < heads; ++h) {
        std::copy(lc.attn[h].data(), lc.attn[h].data() + lc.attn[h].size(),
                  rec.map.begin() +
                      static_cast<std::ptrdiff_t>(h) * positions * tokens);
      }
      out.attention.push_back(std::move(rec));
    }
  }
  RowMatrix y = x * params_.value(out_w_);
  y.rowwise() += params_.value(out_b_).row(0);
  out.noise = RowsToLatent(y, latent_, z_t.scale);
  if (retain_cache) {
    cache->x_final = std::move(x);
    out.cache = std::move(cache);
  }
  return out;
}

BackwardResult ToyBackbone::Backward(const NoisePrediction& forward,
                                     const LatentImage& grad_prediction,
                                     GradRequest request) const {
  const auto* cache = dynamic_cast<const Cache*>(forward.cache.get());
  if (cache == nullptr) {
    throw std::logic_error("Backward needs a PredictNoise call with "
                           "retain_cache=true");
  }
  if (!(grad_prediction.geometry == latent_)) {
    throw DimensionError("Backward: gradient geometry mismatch");
  }
  const int heads = config_.heads;
  const int dh = config_.head_dim;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  BackwardResult result;
  GradientSet& grads = result.params;
  grads.resize(params_.size());
  auto train = [&](int index) {
    return request.params && IsTrainableOwner(params_.entries()[index].owner);
  };
  auto colsum = [](const RowMatrix& m) {
    return RowMatrix(m.colwise().sum());
  };

  const RowMatrix dy = LatentToRows(grad_prediction);
  if (train(out_w_)) grads[out_w_] = cache->x_final.transpose() * dy;
  if (train(out_b_)) grads[out_b_] = colsum(dy);
  RowMatrix dx = dy * params_.value(out_w_).transpose();

  for (std::size_t li = layers_.size(); li-- > 0;) {
    const LayerParams& lp = layer_params_[li];
    const Cache::Layer& lc = cache->layers[li];

    if (train(lp.to_out_w)) grads[lp.to_out_w] = lc.o.transpose() * dx;
    if (train(lp.to_out_b)) grads[lp.to_out_b] = colsum(dx);
    const RowMatrix d_o = dx * params_.value(lp.to_out_w).transpose();

    RowMatrix dq = RowMatrix::Zero(lc.q.rows(), lc.q.cols());
    RowMatrix dk = RowMatrix::Zero(lc.k.rows(), lc.k.cols());
    RowMatrix dv = RowMatrix::Zero(lc.v.rows(), lc.v.cols());
    for (int h = 0; h < heads; ++h) {
      const RowMatrix& a = lc.attn[h];
      const RowMatrix doh = d_o.middleCols(h * dh, dh);
      const RowMatrix da = doh * lc.v.middleCols(h * dh, dh).transpose();
      dv.middleCols(h * dh, dh) = a.transpose() * doh;
      const Eigen::VectorXd row_dot = a.cwiseProduct(da).rowwise().sum();
      const RowMatrix ds = a.cwiseProduct(RowMatrix(da.colwise() - row_dot));
      dq.middleCols(h * dh, dh) = scale * (ds * lc.k.middleCols(h * dh, dh));
      dk.middleCols(h * dh, dh) =
          scale * (ds.transpose() * lc.q.middleCols(h * dh, dh));
    }
    if (train(lp.to_q)) grads[lp.to_q] = lc.x_res.transpose() * dq;
    if (train(lp.to_k)) grads[lp.to_k] = cache->context.transpose() * dk;
    if (train(lp.to_v)) grads[lp.to_v] = cache->context.transpose() * dv;
    const RowMatrix dx_res = dx + dq * params_.value(lp.to_q).transpose();

    if (train(lp.res_w2)) grads[lp.res_w2] = lc.g.transpose() * dx_res;
    const RowMatrix dg = dx_res * params_.value(lp.res_w2).transpose();
    const RowMatrix du =
        dg.cwiseProduct(RowMatrix((1.0 - lc.g.array().square()).matrix()));
    if (train(lp.res_w1)) grads[lp.res_w1] = lc.x_in.transpose() * du;
    if (train(lp.res_b1)) grads[lp.res_b1] = colsum(du);
    dx = dx_res + du * params_.value(lp.res_w1).transpose();
  }

  if (train(in_w_)) grads[in_w_] = cache->z.transpose() * dx;
  if (train(in_b_)) grads[in_b_] = colsum(dx);
  if (train(pos_)) grads[pos_] = dx;
  if (train(time_w_)) {
    grads[time_w_] = cache->temb.transpose() * dx.colwise().sum();
  }
  if (request.input) {
    const RowMatrix dz = dx * params_.value(in_w_).transpose();
    result.input = RowsToLatent(dz, latent_, grad_prediction.scale);
  }
  return result;
}

std::unique_ptr<Backbone> ToyBackbone::Clone() const {
  return std::unique_ptr<Backbone>(new ToyBackbone(*this));
}

std::filesystem::path DataDirectory() {
  if (const char* env = std::getenv("ARTSHIELD_DATA_DIR");
      env != nullptr && *env != '\0') {
    return env;
  }
  return ARTSHIELD_DEFAULT_DATA_DIR;
}

std::vector<std::string> KnownBackbones() {
  return {"toy", "toy-paper", "toy-identity"};
}

std::filesystem::path WeightsPath(std::string_view identifier) {
  return DataDirectory() / (std::string(identifier) + ".weights");
}

std::unique_ptr<Backbone> MakeBackbone(std::string_view identifier) {
  ToyBackboneConfig config;
  if (identifier == "toy") {
    config = ToyBackboneConfig::Compact();
  } else if (identifier == "toy-paper") {
    config = ToyBackboneConfig::PaperShape();
  } else if (identifier == "toy-identity") {
    config = ToyBackboneConfig::Identity();
  } else {
    throw NotFoundError("unknown backbone '" + std::string(identifier) + "'");
  }
  auto backbone = std::make_unique<ToyBackbone>(config);
  const auto path = WeightsPath(identifier);
  if (std::filesystem::exists(path)) backbone->params().LoadValuesFrom(path);
  return backbone;
}

}  // namespace artshield
