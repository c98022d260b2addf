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

#ifndef ARTSHIELD_PROBE_ATTENTION_PROBE_HPP_
#define ARTSHIELD_PROBE_ATTENTION_PROBE_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "artshield/backend/backbone.hpp"
#include "artshield/backend/sampler.hpp"
#include "artshield/core/rng.hpp"
#include "artshield/providers/providers.hpp"

namespace artshield {

struct ProbePrompt {
  std::string text;
  std::string content_word;
  // Artist name standing in for a style.
  std::string style_phrase;
};

// "a <content> in the style of <artist>"
ProbePrompt MakeProbePrompt(std::string_view content, std::string_view artist);

// Five contents by thirty artists, content-major.
std::vector<ProbePrompt> ProbeGrid();
const std::vector<std::string>& ProbeContents();
const std::vector<std::string>& ProbeArtists();

// Embeds the prompt and fills its style and content spans. Throws
// NotFoundError when a phrase is missing and ConfigError on overlap.
PromptEmbedding ResolveTokenSpans(const ProbePrompt& prompt,
                                  const Backbone& backbone);

// Mean attention mass over heads, queries and span tokens.
double ActivationStrength(const AttentionRecord& record,
                          std::span<const int> span);

// Restricts a record to the given token columns.
AttentionRecord SpanColumns(const AttentionRecord& record,
                            std::span<const int> span);

// Linear resampling to `size` points with both endpoints kept.
std::vector<double> ResampleLinear(std::span<const double> values, int size);

// Averages heads, flattens [queries, tokens] row-major and resamples to 768.
std::vector<double> ProjectAttention(const AttentionRecord& record);

// Cosine similarity; throws RangeError on a zero-norm input.
double DescriptorAlignment(std::span<const double> a, std::span<const double> b);

enum class DivergenceMode { kActivation, kAlignment };

std::string_view DivergenceModeName(DivergenceMode mode);
DivergenceMode ParseDivergenceMode(std::string_view name);

struct LayerScore {
  CrossAttnLayerId layer;
  double style_mean = 0.0;
  double content_mean = 0.0;
  double divergence = 0.0;
  // NaN in activation-only runs.
  double csd_style_sim = 0.0;
  double csd_content_sim = 0.0;
  DivergenceMode mode = DivergenceMode::kActivation;
};

struct ProbeConfig {
  // Empty means {T / 2}. Each entry must lie on the DDIM grid.
  std::vector<int> timesteps;
  SamplerOptions sampler;
  std::uint64_t seed = kDefaultSeed;
  DivergenceMode mode = DivergenceMode::kActivation;
};

struct ProbeReport {
  std::vector<LayerScore> scores;
  // (prompt text, captured timestep) pairs in evaluation order.
  std::vector<std::pair<std::string, int>> evaluations;
  std::vector<int> timesteps;
  bool alignment_available = false;
  std::vector<std::string> warnings;
};

// `provider` may be null for activation-only runs. Provider failures
// downgrade the run to activation-only and add a warning.
ProbeReport RunProbe(const Backbone& backbone, std::span<const ProbePrompt> prompts,
                     const StyleDescriptorProvider* provider,
                     const ProbeConfig& config);

void WriteProbeCsv(const ProbeReport& report, const std::filesystem::path& path);
// Grouped bar chart of style and content means per layer.
void WriteProbeSvg(const ProbeReport& report, const std::filesystem::path& path);

}  // namespace artshield

#endif  // ARTSHIELD_PROBE_ATTENTION_PROBE_HPP_
