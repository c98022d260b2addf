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

#include "artshield/backend/backbone.hpp"

#include <atomic>
#include <cmath>

#include "artshield/core/errors.hpp"
#include "artshield/core/rng.hpp"

namespace artshield {
namespace {

std::uint64_t NextInstanceId() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

}  // namespace

Backbone::Backbone() : instance_id_(NextInstanceId()) {}

Backbone::Backbone(const Backbone& other)
    : instance_id_(NextInstanceId()),
      trainable_(other.trainable_),
      trainable_by_index_(other.trainable_by_index_),
      core_trainable_(other.core_trainable_) {}

int Backbone::LayerIndex(const CrossAttnLayerId& id) const {
  const auto& ids = layer_ids();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == id) return static_cast<int>(i);
  }
  throw NotFoundError("backbone '" + std::string(identifier()) +
                      "' has no layer " + id.canonical_name());
}

BackboneHandle Backbone::SetTrainable(std::span<const CrossAttnLayerId> layers,
                                      bool include_core) {
  std::vector<bool> by_index(layer_ids().size(), false);
  std::set<CrossAttnLayerId> chosen;
  for (const auto& id : layers) {
    by_index[LayerIndex(id)] = true;
    chosen.insert(id);
  }
  trainable_ = std::move(chosen);
  trainable_by_index_ = std::move(by_index);
  core_trainable_ = include_core;
  return handle();
}

BackboneHandle Backbone::SetFullyTrainable() {
  return SetTrainable(layer_ids(), true);
}

bool Backbone::IsTrainableOwner(int owner) const {
  if (owner == kFrozenOwner) return false;
  if (owner == kCoreOwner) return core_trainable_;
  return owner < static_cast<int>(trainable_by_index_.size()) &&
         trainable_by_index_[owner];
}

std::vector<bool> Backbone::TrainableParamMask() const {
  const auto& entries = params().entries();
  std::vector<bool> mask(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    mask[i] = IsTrainableOwner(entries[i].owner);
  }
  return mask;
}

BackboneHandle Backbone::handle() const {
  return BackboneHandle{std::string(identifier()), instance_id_,
                        latent_geometry(), layer_ids(), trainable_,
                        core_trainable_};
}

LatentImage AddNoiseAt(double alpha_bar, const LatentImage& z0,
                       const LatentImage& eps) {
  if (!(z0.geometry == eps.geometry) || z0.data.size() != eps.data.size()) {
    throw DimensionError("AddNoise: noise shape differs from latent");
  }
  if (!(alpha_bar >= 0.0 && alpha_bar <= 1.0)) {
    throw RangeError("AddNoise: alpha_bar outside [0, 1]");
  }
  const double a = std::sqrt(alpha_bar);
  const double b = std::sqrt(1.0 - alpha_bar);
  LatentImage out = z0;
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    out.data[i] = a * z0.data[i] + b * eps.data[i];
  }
  return out;
}

LatentImage AddNoise(const NoiseSchedule& schedule, const LatentImage& z0,
                     int t, const LatentImage& eps) {
  return AddNoiseAt(schedule.alpha_cumprod(t), z0, eps);
}

LatentImage SampleNormalLatent(const LatentGeometry& g, Rng& rng,
                               double scale) {
  LatentImage out = LatentImage::Zeros(g, scale);
  for (double& v : out.data) v = rng.Normal();
  return out;
}

}  // namespace artshield
