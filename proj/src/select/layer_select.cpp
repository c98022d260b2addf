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

#include "artshield/select/layer_select.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <set>

#include "artshield/core/errors.hpp"

namespace artshield {
namespace {

const CrossAttnLayerId& Find(std::span<const CrossAttnLayerId> layout,
                             std::string_view name) {
  const CrossAttnLayerId id = CrossAttnLayerId::Parse(name);
  const auto it = std::find(layout.begin(), layout.end(), id);
  if (it == layout.end()) {
    throw NotFoundError("layer " + std::string(name) +
                        " is not present on this backbone");
  }
  return *it;
}

}  // namespace

std::vector<RankedLayer> RankLayers(std::span<const LayerScore> scores) {
  if (scores.empty()) throw ConfigError("RankLayers: no scores");
  std::set<CrossAttnLayerId> seen;
  for (const auto& s : scores) {
    if (!seen.insert(s.layer).second) {
      throw ConfigError("duplicate layer " + s.layer.canonical_name());
    }
  }
  std::vector<RankedLayer> ranked;
  for (const auto& s : scores) ranked.push_back({s.layer, s.divergence});
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedLayer& a, const RankedLayer& b) {
                     return a.divergence > b.divergence;
                   });
  return ranked;
}

std::string_view LayerPresetName(LayerPreset preset) {
  switch (preset) {
    case LayerPreset::kPaperTop4:
      return "paper_top4";
    case LayerPreset::kTop1:
      return "top1";
    case LayerPreset::kMid5:
      return "mid5";
  }
  return "";
}

LayerPreset ParseLayerPreset(std::string_view name) {
  if (name == "paper_top4") return LayerPreset::kPaperTop4;
  if (name == "top1" || name == "top1_most_sensitive") return LayerPreset::kTop1;
  if (name == "mid5") return LayerPreset::kMid5;
  throw ConfigError("unknown layer preset: " + std::string(name));
}

SelectionPolicy SelectionPolicy::TopK(int k) {
  if (k < 1) throw ConfigError("top-k needs k >= 1");
  SelectionPolicy p;
  p.mode = SelectionMode::kTopK;
  p.k = k;
  return p;
}

SelectionPolicy SelectionPolicy::Preset(LayerPreset preset) {
  SelectionPolicy p;
  p.mode = SelectionMode::kPreset;
  p.preset = preset;
  return p;
}

SelectionPolicy SelectionPolicy::Parse(std::string_view text) {
  constexpr std::string_view kTopK = "top_k:";
  if (text.starts_with(kTopK)) {
    int k = 0;
    const auto* begin = text.data() + kTopK.size();
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, k);
    if (ec != std::errc() || ptr != end) {
      throw ConfigError("bad selection policy: " + std::string(text));
    }
    return TopK(k);
  }
  return Preset(ParseLayerPreset(text));
}

std::string SelectionPolicy::ToString() const {
  return mode == SelectionMode::kTopK ? "top_k:" + std::to_string(k)
                                      : std::string(LayerPresetName(preset));
}

std::vector<CrossAttnLayerId> ResolvePreset(
    LayerPreset preset, std::span<const CrossAttnLayerId> layout) {
  switch (preset) {
    case LayerPreset::kPaperTop4:
      return {Find(layout, "up_blocks.1.attentions.0"),
              Find(layout, "up_blocks.1.attentions.2"),
              Find(layout, "up_blocks.2.attentions.2"),
              Find(layout, "down_blocks.2.attentions.1")};
    case LayerPreset::kTop1:
      return {Find(layout, "up_blocks.1.attentions.2")};
    case LayerPreset::kMid5: {
      const auto first = std::find(layout.begin(), layout.end(),
                                   Find(layout, "down_blocks.2.attentions.1"));
      const auto last = std::find(layout.begin(), layout.end(),
                                  Find(layout, "up_blocks.1.attentions.2"));
      if (last < first) throw ConfigError("mid5 endpoints out of order");
      return {first, last + 1};
    }
  }
  throw ConfigError("unknown preset");
}

std::vector<CrossAttnLayerId> SelectLayers(
    const SelectionPolicy& policy, std::span<const RankedLayer> ranking,
    std::span<const CrossAttnLayerId> layout) {
  if (policy.mode == SelectionMode::kPreset) {
    return ResolvePreset(policy.preset, layout);
  }
  if (policy.k < 1 || policy.k > static_cast<int>(ranking.size())) {
    throw ConfigError("top-k needs 1 <= k <= " +
                      std::to_string(ranking.size()) + ", got " +
                      std::to_string(policy.k));
  }
  std::vector<CrossAttnLayerId> out;
  for (int i = 0; i < policy.k; ++i) out.push_back(ranking[i].layer);
  return out;
}

nlohmann::json ToJson(const SelectionManifest& manifest) {
  nlohmann::json layers = nlohmann::json::array();
  for (std::size_t i = 0; i < manifest.layers.size(); ++i) {
    nlohmann::json entry = {{"layer", manifest.layers[i].canonical_name()}};
    if (i < manifest.divergences.size()) {
      entry["divergence"] = manifest.divergences[i];
    }
    layers.push_back(entry);
  }
  return {{"policy", manifest.policy.ToString()},
          {"backbone", manifest.backbone},
          {"layers", layers}};
}

SelectionManifest SelectionManifestFromJson(const nlohmann::json& j) {
  SelectionManifest m;
  m.policy = SelectionPolicy::Parse(j.at("policy").get<std::string>());
  m.backbone = j.value("backbone", "");
  for (const auto& entry : j.at("layers")) {
    m.layers.push_back(
        CrossAttnLayerId::Parse(entry.at("layer").get<std::string>()));
    if (entry.contains("divergence")) {
      m.divergences.push_back(entry["divergence"].get<double>());
    }
  }
  return m;
}

}  // namespace artshield
