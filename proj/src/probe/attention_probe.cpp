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

#include "artshield/probe/attention_probe.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>

#include "artshield/core/errors.hpp"
#include "artshield/kernels/kernels.hpp"

namespace artshield {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Token positions of the first occurrence of `phrase` after the BOS token.
std::vector<int> FindPhrase(const Tokenizer& tokenizer,
                            const std::vector<std::string>& pieces,
                            std::string_view phrase) {
  const std::vector<std::string> needle = tokenizer.Pieces(phrase);
  if (needle.empty()) {
    throw NotFoundError("phrase '" + std::string(phrase) + "' has no tokens");
  }
  // Skip BOS and EOS so spans never include special tokens.
  const int first = 1;
  const int last = static_cast<int>(pieces.size()) - 1;
  const int n = static_cast<int>(needle.size());
  for (int start = first; start + n <= last; ++start) {
    if (std::equal(needle.begin(), needle.end(), pieces.begin() + start)) {
      std::vector<int> span(n);
      std::iota(span.begin(), span.end(), start);
      return span;
    }
  }
  throw NotFoundError("phrase '" + std::string(phrase) +
                      "' not found in prompt");
}

struct PromptResult {
  // [timestep][layer]
  std::vector<std::vector<double>> style, content, style_sim, content_sim;
  bool provider_failed = false;
  std::string provider_error;
  std::exception_ptr error;
};

}  // namespace

ProbePrompt MakeProbePrompt(std::string_view content, std::string_view artist) {
  return {"a " + std::string(content) + " in the style of " +
              std::string(artist),
          std::string(content), std::string(artist)};
}

const std::vector<std::string>& ProbeContents() {
  static const std::vector<std::string> kContents = {"dog", "car", "house",
                                                     "tree", "boat"};
  return kContents;
}

const std::vector<std::string>& ProbeArtists() {
  static const std::vector<std::string> kArtists = {
      "ClaudeMonet",       "VincentVanGogh",    "PabloPicasso",
      "RembrandtVanRijn",  "SalvadorDali",      "HenriMatisse",
      "GustavKlimt",       "EdvardMunch",       "PaulCezanne",
      "WassilyKandinsky",  "JoanMiro",          "FridaKahlo",
      "KatsushikaHokusai", "JohannesVermeer",   "EdgarDegas",
      "PierreRenoir",      "CamillePissarro",   "GeorgesSeurat",
      "PaulGauguin",       "AndyWarhol",        "JacksonPollock",
      "MarkRothko",        "ReneMagritte",      "EgonSchiele",
      "AlbrechtDurer",     "CaravaggioMerisi",  "JMWTurner",
      "JohnConstable",     "AmedeoModigliani",  "GeorgiaOKeeffe",
  };
  return kArtists;
}

std::vector<ProbePrompt> ProbeGrid() {
  std::vector<ProbePrompt> grid;
  for (const auto& content : ProbeContents()) {
    for (const auto& artist : ProbeArtists()) {
      grid.push_back(MakeProbePrompt(content, artist));
    }
  }
  return grid;
}

PromptEmbedding ResolveTokenSpans(const ProbePrompt& prompt,
                                  const Backbone& backbone) {
  PromptEmbedding embedding = backbone.EmbedPrompt(prompt.text);
  const Tokenizer& tokenizer = backbone.tokenizer();
  const auto pieces = tokenizer.Encode(prompt.text).pieces;
  std::vector<int> style = FindPhrase(tokenizer, pieces, prompt.style_phrase);
  std::vector<int> content = FindPhrase(tokenizer, pieces, prompt.content_word);
  const std::set<int> style_set(style.begin(), style.end());
  for (int i : content) {
    if (style_set.count(i)) {
      throw ConfigError("style and content spans overlap in '" + prompt.text +
                        "'");
    }
  }
  embedding.spans[TokenRole::kStyle] = std::move(style);
  embedding.spans[TokenRole::kContent] = std::move(content);
  return embedding;
}

double ActivationStrength(const AttentionRecord& record,
                          std::span<const int> span) {
  for (int i : span) {
    if (i < 0 || i >= record.tokens) {
      throw RangeError("span index " + std::to_string(i) + " outside [0, " +
                       std::to_string(record.tokens) + ")");
    }
  }
  return kernels::SpanMean(record.map, record.heads, record.queries,
                           record.tokens, span);
}

AttentionRecord SpanColumns(const AttentionRecord& record,
                            std::span<const int> span) {
  if (span.empty()) throw RangeError("empty span");
  AttentionRecord out{record.layer, record.heads, record.queries,
                      static_cast<int>(span.size()), {}};
  out.map.reserve(static_cast<std::size_t>(out.heads) * out.queries *
                  out.tokens);
  for (int h = 0; h < record.heads; ++h) {
    for (int q = 0; q < record.queries; ++q) {
      for (int i : span) {
        if (i < 0 || i >= record.tokens) throw RangeError("span index out of range");
        out.map.push_back(record.at(h, q, i));
      }
    }
  }
  return out;
}

std::vector<double> ResampleLinear(std::span<const double> values, int size) {
  if (values.size() < 2) {
    throw DimensionError("resampling needs at least 2 values");
  }
  if (size < 2) throw RangeError("resampled size must be >= 2");
  std::vector<double> out(size);
  const double last = static_cast<double>(values.size() - 1);
  for (int i = 0; i < size; ++i) {
    const double pos = last * i / (size - 1);
    const auto lo = std::min(static_cast<std::size_t>(pos), values.size() - 2);
    const double frac = pos - static_cast<double>(lo);
    out[i] = values[lo] + frac * (values[lo + 1] - values[lo]);
  }
  out.front() = values.front();
  out.back() = values.back();
  return out;
}

std::vector<double> ProjectAttention(const AttentionRecord& record) {
  const std::size_t cells =
      static_cast<std::size_t>(record.queries) * record.tokens;
  if (record.heads < 1 || cells < 2) {
    throw DimensionError("attention record too small to project");
  }
  std::vector<double> mean(cells, 0.0);
  for (int h = 0; h < record.heads; ++h) {
    for (std::size_t i = 0; i < cells; ++i) mean[i] += record.map[h * cells + i];
  }
  for (double& v : mean) v /= record.heads;
  return ResampleLinear(mean, kStyleDescriptorDim);
}

double DescriptorAlignment(std::span<const double> a,
                           std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("descriptor lengths differ: " +
                         std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw RangeError("zero-norm descriptor");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

std::string_view DivergenceModeName(DivergenceMode mode) {
  return mode == DivergenceMode::kActivation ? "activation" : "alignment";
}

DivergenceMode ParseDivergenceMode(std::string_view name) {
  if (name == "activation") return DivergenceMode::kActivation;
  if (name == "alignment") return DivergenceMode::kAlignment;
  throw ConfigError("unknown divergence mode: " + std::string(name));
}

ProbeReport RunProbe(const Backbone& backbone,
                     std::span<const ProbePrompt> prompts,
                     const StyleDescriptorProvider* provider,
                     const ProbeConfig& config) {
  if (prompts.empty()) throw ConfigError("RunProbe: no prompts given");
  if (!backbone.supports_attention_capture()) {
    throw UnsupportedError("RunProbe: backbone cannot capture attention");
  }
  ProbeReport report;
  const int total_steps = backbone.schedule().num_timesteps();
  report.timesteps = config.timesteps.empty()
                         ? std::vector<int>{total_steps / 2}
                         : config.timesteps;
  const std::vector<int> grid =
      DdimTimesteps(total_steps, config.sampler.steps);
  for (int t : report.timesteps) {
    if (std::find(grid.begin(), grid.end(), t) == grid.end()) {
      throw ConfigError("probe timestep " + std::to_string(t) +
                        " is not on the " + std::to_string(config.sampler.steps) +
                        "-step sampling grid");
    }
  }
  if (config.mode == DivergenceMode::kAlignment && provider == nullptr) {
    throw ConfigError("alignment mode needs a style descriptor provider");
  }

  const std::size_t num_layers = backbone.layer_ids().size();
  const std::size_t num_t = report.timesteps.size();
  std::vector<PromptResult> results(prompts.size());

#pragma omp parallel for schedule(dynamic)
  for (std::size_t p = 0; p < prompts.size(); ++p) {
    PromptResult& r = results[p];
    try {
      const PromptEmbedding embedding = ResolveTokenSpans(prompts[p], backbone);
      const auto& style_span = embedding.spans.at(TokenRole::kStyle);
      const auto& content_span = embedding.spans.at(TokenRole::kContent);
      std::vector<std::vector<AttentionRecord>> captured(num_t);
      // Seeding by text keeps results independent of prompt order.
      Rng rng(DeriveSeed(config.seed, prompts[p].text));
      const LatentImage final_latent = SampleDdim(
          backbone, embedding, rng, config.sampler, true,
          [&](int t, const NoisePrediction& pred) {
            const auto it =
                std::find(report.timesteps.begin(), report.timesteps.end(), t);
            if (it != report.timesteps.end()) {
              captured[it - report.timesteps.begin()] = pred.attention;
            }
          });
      std::vector<double> descriptor;
      if (provider != nullptr) {
        try {
          descriptor = provider->Describe(backbone.Decode(final_latent));
          if (descriptor.size() != static_cast<std::size_t>(kStyleDescriptorDim)) {
            throw ProviderError("descriptor has length " +
                                std::to_string(descriptor.size()));
          }
        } catch (const std::exception& e) {
          r.provider_failed = true;
          r.provider_error = e.what();
          descriptor.clear();
        }
      }
      for (auto* v : {&r.style, &r.content, &r.style_sim, &r.content_sim}) {
        v->assign(num_t, std::vector<double>(num_layers, kNaN));
      }
      for (std::size_t k = 0; k < num_t; ++k) {
        for (std::size_t l = 0; l < num_layers; ++l) {
          const AttentionRecord& rec = captured[k].at(l);
          r.style[k][l] = ActivationStrength(rec, style_span);
          r.content[k][l] = ActivationStrength(rec, content_span);
          if (!descriptor.empty()) {
            r.style_sim[k][l] = DescriptorAlignment(
                descriptor, ProjectAttention(SpanColumns(rec, style_span)));
            r.content_sim[k][l] = DescriptorAlignment(
                descriptor, ProjectAttention(SpanColumns(rec, content_span)));
          }
        }
      }
    } catch (...) {
      r.error = std::current_exception();
    }
  }
  for (const auto& r : results) {
    if (r.error) std::rethrow_exception(r.error);
  }

  report.alignment_available = provider != nullptr;
  for (std::size_t p = 0; p < prompts.size(); ++p) {
    if (results[p].provider_failed && report.alignment_available) {
      report.alignment_available = false;
      report.warnings.push_back("style descriptor provider failed (" +
                                results[p].provider_error +
                                "); falling back to activation-only scores");
    }
    for (int t : report.timesteps) report.evaluations.emplace_back(prompts[p].text, t);
  }
  DivergenceMode mode = config.mode;
  if (mode == DivergenceMode::kAlignment && !report.alignment_available) {
    mode = DivergenceMode::kActivation;
  }

  // Accumulate in a canonical prompt order so sums are order independent.
  std::vector<std::size_t> order(prompts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(prompts[a].text, prompts[a].content_word,
                    prompts[a].style_phrase) <
           std::tie(prompts[b].text, prompts[b].content_word,
                    prompts[b].style_phrase);
  });
  const double count = static_cast<double>(prompts.size() * num_t);
  for (std::size_t l = 0; l < num_layers; ++l) {
    LayerScore s;
    s.layer = backbone.layer_ids()[l];
    s.mode = mode;
    double ss = 0.0, cs = 0.0;
    for (std::size_t p : order) {
      for (std::size_t k = 0; k < num_t; ++k) {
        s.style_mean += results[p].style[k][l];
        s.content_mean += results[p].content[k][l];
        ss += results[p].style_sim[k][l];
        cs += results[p].content_sim[k][l];
      }
    }
    s.style_mean /= count;
    s.content_mean /= count;
    s.csd_style_sim = report.alignment_available ? ss / count : kNaN;
    s.csd_content_sim = report.alignment_available ? cs / count : kNaN;
    s.divergence = mode == DivergenceMode::kActivation
                       ? s.style_mean - s.content_mean
                       : s.csd_style_sim - s.csd_content_sim;
    report.scores.push_back(s);
  }
  return report;
}

void WriteProbeCsv(const ProbeReport& report,
                   const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(10);
  out << "layer,style_mean,content_mean,divergence,csd_style_sim,"
         "csd_content_sim,mode\n";
  for (const auto& s : report.scores) {
    out << s.layer.canonical_name() << ',' << s.style_mean << ','
        << s.content_mean << ',' << s.divergence << ',';
    if (std::isnan(s.csd_style_sim)) {
      out << ",,";
    } else {
      out << s.csd_style_sim << ',' << s.csd_content_sim << ',';
    }
    out << DivergenceModeName(s.mode) << '\n';
  }
}

void WriteProbeSvg(const ProbeReport& report,
                   const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  const int n = static_cast<int>(report.scores.size());
  const int group = 36, bar = 14, left = 60, top = 20, height = 240;
  const int width = left + n * group + 20;
  const int total_height = top + height + 170;
  double peak = 1e-12;
  for (const auto& s : report.scores) {
    peak = std::max({peak, s.style_mean, s.content_mean});
  }
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << total_height << "\" font-family=\"sans-serif\" "
      << "font-size=\"10\">\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top + height << "\" x2=\""
      << width - 10 << "\" y2=\"" << top + height << "\" stroke=\"black\"/>\n";
  out << "<text x=\"4\" y=\"" << top + 10 << "\">" << peak << "</text>\n";
  for (int i = 0; i < n; ++i) {
    const auto& s = report.scores[i];
    const int x = left + i * group;
    const double hs = height * s.style_mean / peak;
    const double hc = height * s.content_mean / peak;
    out << "<rect x=\"" << x << "\" y=\"" << top + height - hs << "\" width=\""
        << bar << "\" height=\"" << hs << "\" fill=\"#d95f02\"/>\n";
    out << "<rect x=\"" << x + bar << "\" y=\"" << top + height - hc
        << "\" width=\"" << bar << "\" height=\"" << hc
        << "\" fill=\"#1b9e77\"/>\n";
    out << "<text transform=\"translate(" << x + bar << ',' << top + height + 8
        << ") rotate(60)\">" << s.layer.canonical_name() << "</text>\n";
  }
  out << "<rect x=\"" << width - 120 << "\" y=\"4\" width=\"10\" height=\"10\" "
      << "fill=\"#d95f02\"/><text x=\"" << width - 106 << "\" y=\"13\">style"
      << "</text>\n";
  out << "<rect x=\"" << width - 70 << "\" y=\"4\" width=\"10\" height=\"10\" "
      << "fill=\"#1b9e77\"/><text x=\"" << width - 56 << "\" y=\"13\">content"
      << "</text>\n";
  out << "</svg>\n";
}

}  // namespace artshield
