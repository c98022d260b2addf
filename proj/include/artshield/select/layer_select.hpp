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

#ifndef ARTSHIELD_SELECT_LAYER_SELECT_HPP_
#define ARTSHIELD_SELECT_LAYER_SELECT_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "artshield/backend/layer_id.hpp"
#include "artshield/probe/attention_probe.hpp"

namespace artshield {

struct RankedLayer {
  CrossAttnLayerId layer;
  double divergence = 0.0;
};

// Descending by divergence; ties keep the input (enumeration) order.
// Throws ConfigError on duplicate layers or an empty list.
std::vector<RankedLayer> RankLayers(std::span<const LayerScore> scores);

enum class SelectionMode { kTopK, kPreset };
enum class LayerPreset { kPaperTop4, kTop1, kMid5 };

std::string_view LayerPresetName(LayerPreset preset);
LayerPreset ParseLayerPreset(std::string_view name);

struct SelectionPolicy {
  SelectionMode mode = SelectionMode::kTopK;
  int k = 4;
  LayerPreset preset = LayerPreset::kPaperTop4;

  static SelectionPolicy TopK(int k);
  static SelectionPolicy Preset(LayerPreset preset);
  // "top_k:<k>" or a preset name.
  static SelectionPolicy Parse(std::string_view text);
  std::string ToString() const;
};

// Preset membership on `layout`. Throws NotFoundError when a named layer is
// absent from it.
std::vector<CrossAttnLayerId> ResolvePreset(
    LayerPreset preset, std::span<const CrossAttnLayerId> layout);

// Top-k returns the ranking prefix; presets ignore the ranking but are
// resolved against `layout`.
std::vector<CrossAttnLayerId> SelectLayers(
    const SelectionPolicy& policy, std::span<const RankedLayer> ranking,
    std::span<const CrossAttnLayerId> layout);

struct SelectionManifest {
  SelectionPolicy policy;
  std::vector<CrossAttnLayerId> layers;
  // Divergence per chosen layer, when a ranking was available.
  std::vector<double> divergences;
  std::string backbone;
};

nlohmann::json ToJson(const SelectionManifest& manifest);
SelectionManifest SelectionManifestFromJson(const nlohmann::json& j);

}  // namespace artshield

#endif  // ARTSHIELD_SELECT_LAYER_SELECT_HPP_
