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

#ifndef ARTSHIELD_PIPELINE_RUN_CONFIG_HPP_
#define ARTSHIELD_PIPELINE_RUN_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "artshield/eval/report.hpp"
#include "artshield/mimicry/mimicry.hpp"
#include "artshield/probe/attention_probe.hpp"
#include "artshield/protect/protect_engine.hpp"
#include "artshield/providers/providers.hpp"
#include "artshield/select/layer_select.hpp"

namespace artshield {

enum class ProbePromptSet { kGrid, kCompact };

struct ProbeSettings {
  // kGrid is the 5 x 30 content/artist grid; kCompact uses 2 x 3.
  ProbePromptSet prompts = ProbePromptSet::kGrid;
  std::vector<int> timesteps;
  DivergenceMode mode = DivergenceMode::kActivation;
};

struct ProviderIds {
  std::string style = "stub";
  std::string perceptual = "stub";
  std::string features = "stub";
};

struct RunConfig {
  std::string backbone = "toy-paper";
  std::uint64_t seed = kDefaultSeed;
  std::filesystem::path output_dir = "runs/default";
  // Row label of the protected arm in reports.
  std::string method = "StyleProtect";
  // A SelectionPolicy string, or "explicit" to use protect.selected_layers.
  std::string selection = "paper_top4";
  int sampler_steps = 20;
  ProbeSettings probe;
  // Seeds inside these are ignored; stage seeds derive from `seed`.
  ProtectConfig protect;
  MimicryConfig mimic;
  ProviderIds providers;
  std::vector<TransformTag> robustness = {TransformTag::kJpeg75,
                                          TransformTag::kBlur3};

  // Throws ConfigError.
  void Validate() const;
  // Hash of everything except `seed` and `output_dir`.
  std::string Hash() const;
};

nlohmann::json ToJson(const RunConfig& config);
// Missing keys keep their defaults; unknown keys throw ConfigError.
RunConfig RunConfigFromJson(const nlohmann::json& j);
RunConfig LoadRunConfig(const std::filesystem::path& path);

// Stage seed for one artist, derived from the global seed.
std::uint64_t StageSeed(std::uint64_t global, std::string_view stage,
                        std::string_view artist);

// Stub ids build stub providers; "none" leaves the slot empty. Any other id
// resolves to a provider that reports itself unavailable, naming the
// ARTSHIELD_PROVIDER_CACHE directory it would load from.
ProviderSet MakeProviders(const ProviderIds& ids);
std::filesystem::path ProviderCacheDir();

}  // namespace artshield

#endif  // ARTSHIELD_PIPELINE_RUN_CONFIG_HPP_
