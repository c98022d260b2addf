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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <algorithm>
#include <sstream>

#include "artshield/backend/toy_backbone.hpp"
#include "artshield/core/errors.hpp"
#include "artshield/probe/attention_probe.hpp"
#include "artshield/providers/providers.hpp"
#include "test_util.hpp"

namespace artshield {
namespace {

AttentionRecord UniformRecord(int heads, int queries, int tokens) {
  AttentionRecord r;
  r.heads = heads;
  r.queries = queries;
  r.tokens = tokens;
  r.map.assign(static_cast<std::size_t>(heads) * queries * tokens,
               1.0 / tokens);
  return r;
}

AttentionRecord RandomRecord(Rng& rng, int heads, int queries, int tokens) {
  AttentionRecord r = UniformRecord(heads, queries, tokens);
  for (int row = 0; row < heads * queries; ++row) {
    double z = 0.0;
    for (int t = 0; t < tokens; ++t) {
      double& v = r.map[static_cast<std::size_t>(row) * tokens + t];
      v = std::exp(rng.Normal());
      z += v;
    }
    for (int t = 0; t < tokens; ++t) {
      r.map[static_cast<std::size_t>(row) * tokens + t] /= z;
    }
  }
  return r;
}

ProbeConfig FastConfig() {
  ProbeConfig cfg;
  cfg.sampler.steps = 4;
  return cfg;
}

TEST(TokenSpanTest, ProbeTemplateGivesDisjointSpans) {
  auto bb = MakeBackbone("toy");
  const ProbePrompt p = MakeProbePrompt("dog", "ClaudeMonet");
  EXPECT_EQ(p.text, "a dog in the style of ClaudeMonet");
  const PromptEmbedding e = ResolveTokenSpans(p, *bb);
  const auto& style = e.spans.at(TokenRole::kStyle);
  const auto& content = e.spans.at(TokenRole::kContent);
  ASSERT_FALSE(style.empty());
  ASSERT_EQ(content.size(), 1u);
  for (int s : style) {
    EXPECT_EQ(std::count(content.begin(), content.end(), s), 0);
    EXPECT_GT(s, 0);
    EXPECT_LT(s, e.length - 1);
  }
}

TEST(TokenSpanTest, MultiPieceArtistSpanMatchesStandalonePieceCount) {
  auto bb = MakeBackbone("toy");
  for (const std::string artist : {"ClaudeMonet", "KatsushikaHokusai", "Dali"}) {
    const PromptEmbedding e =
        ResolveTokenSpans(MakeProbePrompt("boat", artist), *bb);
    EXPECT_EQ(e.spans.at(TokenRole::kStyle).size(),
              bb->tokenizer().Pieces(artist).size())
        << artist;
  }
}

TEST(TokenSpanTest, MissingAndOverlappingPhrasesThrow) {
  auto bb = MakeBackbone("toy");
  ProbePrompt missing{"a dog in the style of ClaudeMonet", "cat", "ClaudeMonet"};
  EXPECT_THROW(ResolveTokenSpans(missing, *bb), NotFoundError);
  ProbePrompt overlap{"a dog in the style of dog", "dog", "dog"};
  EXPECT_THROW(ResolveTokenSpans(overlap, *bb), ConfigError);
}

TEST(ActivationStrengthTest, UniformAndDelta) {
  const AttentionRecord u = UniformRecord(2, 64, 77);
  const std::vector<int> one = {5};
  EXPECT_NEAR(ActivationStrength(u, one), 1.0 / 77.0, 1e-12);
  AttentionRecord d = UniformRecord(2, 64, 77);
  std::fill(d.map.begin(), d.map.end(), 0.0);
  for (int row = 0; row < 2 * 64; ++row) d.map[row * 77 + 5] = 1.0;
  EXPECT_DOUBLE_EQ(ActivationStrength(d, one), 1.0);
}

TEST(ActivationStrengthTest, MatchesTripleLoopOracle) {
  Rng rng(31);
  const AttentionRecord r = RandomRecord(rng, 3, 20, 11);
  const std::vector<int> span = {2, 3, 7};
  double s = 0.0;
  for (int h = 0; h < r.heads; ++h) {
    for (int q = 0; q < r.queries; ++q) {
      for (int t : span) s += r.at(h, q, t);
    }
  }
  s /= r.heads * r.queries * static_cast<double>(span.size());
  EXPECT_NEAR(ActivationStrength(r, span), s, 1e-12);
}

TEST(ActivationStrengthTest, PartitionSumsToOne) {
  Rng rng(32);
  const AttentionRecord r = RandomRecord(rng, 2, 16, 10);
  const std::vector<std::vector<int>> parts = {{0, 1, 2}, {3}, {4, 5, 6, 7, 8, 9}};
  double total = 0.0;
  for (const auto& p : parts) total += ActivationStrength(r, p) * p.size();
  EXPECT_NEAR(total, 1.0, 1e-5);
}

TEST(ActivationStrengthTest, BadSpansThrow) {
  const AttentionRecord u = UniformRecord(1, 4, 8);
  EXPECT_THROW(ActivationStrength(u, std::vector<int>{}), RangeError);
  EXPECT_THROW(ActivationStrength(u, std::vector<int>{8}), RangeError);
}

TEST(ProjectAttentionTest, ConstantMapStaysConstant) {
  AttentionRecord r = UniformRecord(2, 64, 77);
  std::fill(r.map.begin(), r.map.end(), 0.25);
  const auto v = ProjectAttention(r);
  ASSERT_EQ(v.size(), 768u);
  for (double x : v) EXPECT_NEAR(x, 0.25, 1e-15);
}

TEST(ProjectAttentionTest, EndpointsPreservedAndLengthFixed) {
  Rng rng(33);
  for (auto [q, t] : {std::pair{64, 77}, std::pair{3, 5}, std::pair{40, 40}}) {
    const AttentionRecord r = RandomRecord(rng, 1, q, t);
    const auto v = ProjectAttention(r);
    ASSERT_EQ(v.size(), 768u);
    EXPECT_EQ(v.front(), r.map.front());
    EXPECT_EQ(v.back(), r.map.back());
  }
}

TEST(ProjectAttentionTest, HeadsAveragedFirst) {
  Rng rng(34);
  const AttentionRecord r = RandomRecord(rng, 2, 8, 6);
  AttentionRecord avg = UniformRecord(1, 8, 6);
  for (std::size_t i = 0; i < avg.map.size(); ++i) {
    avg.map[i] = 0.5 * (r.map[i] + r.map[i + avg.map.size()]);
  }
  const auto a = ProjectAttention(r);
  const auto b = ProjectAttention(avg);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-15);
}

TEST(ProjectAttentionTest, RampStaysRamp) {
  std::vector<double> ramp(64 * 77);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = 0.5 + 2.0 * i;
  const auto v = ResampleLinear(ramp, 768);
  const double slope = 2.0 * (ramp.size() - 1) / 767.0;
  for (int i = 0; i < 768; ++i) EXPECT_NEAR(v[i], 0.5 + slope * i, 1e-6);
}

TEST(ProjectAttentionTest, TooSmallThrows) {
  AttentionRecord r = UniformRecord(1, 1, 1);
  EXPECT_THROW(ProjectAttention(r), DimensionError);
}

TEST(DescriptorAlignmentTest, Examples) {
  Rng rng(35);
  std::vector<double> a(768), b(768);
  for (auto& x : a) x = rng.Normal();
  for (auto& x : b) x = rng.Normal();
  EXPECT_NEAR(DescriptorAlignment(a, a), 1.0, 1e-12);
  std::vector<double> e0(768, 0.0), e1(768, 0.0);
  e0[0] = 1.0;
  e1[1] = 2.0;
  EXPECT_EQ(DescriptorAlignment(e0, e1), 0.0);
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (int i = 0; i < 768; ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  EXPECT_NEAR(DescriptorAlignment(a, b), dot / std::sqrt(na * nb), 1e-7);
  EXPECT_THROW(DescriptorAlignment(a, std::vector<double>(768, 0.0)),
               RangeError);
  EXPECT_THROW(DescriptorAlignment(a, std::vector<double>(10, 1.0)),
               DimensionError);
}

TEST(RunProbeTest, OneScorePerLayerInEnumerationOrder) {
  auto bb = MakeBackbone("toy");
  const std::vector<ProbePrompt> prompts = {MakeProbePrompt("dog", "ClaudeMonet")};
  const auto report = RunProbe(*bb, prompts, nullptr, FastConfig());
  ASSERT_EQ(report.scores.size(), bb->layer_ids().size());
  for (std::size_t i = 0; i < report.scores.size(); ++i) {
    const auto& s = report.scores[i];
    EXPECT_EQ(s.layer, bb->layer_ids()[i]);
    EXPECT_TRUE(std::isfinite(s.style_mean));
    EXPECT_TRUE(std::isfinite(s.content_mean));
    EXPECT_DOUBLE_EQ(s.divergence, s.style_mean - s.content_mean);
    EXPECT_GE(s.style_mean, 0.0);
    EXPECT_LE(s.style_mean, 1.0);
  }
  EXPECT_FALSE(report.alignment_available);
}

TEST(RunProbeTest, DuplicatedPromptsMatchSingleRun) {
  auto bb = MakeBackbone("toy");
  const ProbePrompt p = MakeProbePrompt("car", "GustavKlimt");
  const std::vector<ProbePrompt> one = {p};
  const std::vector<ProbePrompt> three = {p, p, p};
  const auto a = RunProbe(*bb, one, nullptr, FastConfig());
  const auto b = RunProbe(*bb, three, nullptr, FastConfig());
  for (std::size_t i = 0; i < a.scores.size(); ++i) {
    EXPECT_NEAR(a.scores[i].style_mean, b.scores[i].style_mean, 1e-12);
    EXPECT_NEAR(a.scores[i].content_mean, b.scores[i].content_mean, 1e-12);
  }
}

TEST(RunProbeTest, PermutationInvariantAndDeterministic) {
  auto bb = MakeBackbone("toy");
  std::vector<ProbePrompt> prompts = {MakeProbePrompt("dog", "ClaudeMonet"),
                                      MakeProbePrompt("tree", "EdvardMunch"),
                                      MakeProbePrompt("boat", "JoanMiro")};
  const auto a = RunProbe(*bb, prompts, nullptr, FastConfig());
  std::reverse(prompts.begin(), prompts.end());
  const auto b = RunProbe(*bb, prompts, nullptr, FastConfig());
  const auto c = RunProbe(*bb, prompts, nullptr, FastConfig());
  for (std::size_t i = 0; i < a.scores.size(); ++i) {
    EXPECT_EQ(a.scores[i].divergence, b.scores[i].divergence);
    EXPECT_EQ(b.scores[i].divergence, c.scores[i].divergence);
  }
}

TEST(RunProbeTest, FullGridLogs150Evaluations) {
  const auto grid = ProbeGrid();
  ASSERT_EQ(grid.size(), 150u);
  EXPECT_EQ(ProbeContents().size(), 5u);
  EXPECT_EQ(ProbeArtists().size(), 30u);
  auto bb = MakeBackbone("toy");
  const auto report = RunProbe(*bb, grid, nullptr, FastConfig());
  EXPECT_EQ(report.evaluations.size(), 150u);
}

TEST(RunProbeTest, AlignmentModeWithStubProvider) {
  auto bb = MakeBackbone("toy");
  const StubStyleProvider provider;
  ProbeConfig cfg = FastConfig();
  cfg.mode = DivergenceMode::kAlignment;
  const std::vector<ProbePrompt> prompts = {MakeProbePrompt("dog", "ClaudeMonet")};
  const auto report = RunProbe(*bb, prompts, &provider, cfg);
  EXPECT_TRUE(report.alignment_available);
  for (const auto& s : report.scores) {
    EXPECT_EQ(s.mode, DivergenceMode::kAlignment);
    EXPECT_GE(s.csd_style_sim, -1.0);
    EXPECT_LE(s.csd_style_sim, 1.0);
    EXPECT_DOUBLE_EQ(s.divergence, s.csd_style_sim - s.csd_content_sim);
  }
}

class FailingStyleProvider : public StyleDescriptorProvider {
 public:
  std::string name() const override { return "failing"; }
  std::vector<double> Describe(const ImageTensor&) const override {
    throw ProviderError("descriptor weights unavailable");
  }
};

TEST(RunProbeTest, ProviderFailureDowngradesWithWarning) {
  auto bb = MakeBackbone("toy");
  const FailingStyleProvider provider;
  ProbeConfig cfg = FastConfig();
  cfg.mode = DivergenceMode::kAlignment;
  const std::vector<ProbePrompt> prompts = {MakeProbePrompt("dog", "ClaudeMonet")};
  const auto report = RunProbe(*bb, prompts, &provider, cfg);
  EXPECT_FALSE(report.alignment_available);
  EXPECT_FALSE(report.warnings.empty());
  for (const auto& s : report.scores) {
    EXPECT_EQ(s.mode, DivergenceMode::kActivation);
    EXPECT_TRUE(std::isnan(s.csd_style_sim));
  }
}

TEST(RunProbeTest, OffGridTimestepRejected) {
  auto bb = MakeBackbone("toy");
  ProbeConfig cfg = FastConfig();
  cfg.timesteps = {bb->schedule().num_timesteps() / 2 + 1};
  const std::vector<ProbePrompt> prompts = {MakeProbePrompt("dog", "ClaudeMonet")};
  EXPECT_THROW(RunProbe(*bb, prompts, nullptr, cfg), ConfigError);
  EXPECT_THROW(RunProbe(*bb, {}, nullptr, FastConfig()), ConfigError);
}

TEST(ProbeOutputTest, CsvAndSvgWritten) {
  auto bb = MakeBackbone("toy");
  const std::vector<ProbePrompt> prompts = {MakeProbePrompt("dog", "ClaudeMonet")};
  const auto report = RunProbe(*bb, prompts, nullptr, FastConfig());
  const auto dir = std::filesystem::temp_directory_path() / "artshield_probe_test";
  std::filesystem::create_directories(dir);
  WriteProbeCsv(report, dir / "probe.csv");
  WriteProbeSvg(report, dir / "probe.svg");
  std::ifstream csv(dir / "probe.csv");
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line,
            "layer,style_mean,content_mean,divergence,csd_style_sim,"
            "csd_content_sim,mode");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, static_cast<int>(bb->layer_ids().size()));
  std::ifstream svg(dir / "probe.svg");
  std::stringstream ss;
  ss << svg.rdbuf();
  EXPECT_NE(ss.str().find("<svg"), std::string::npos);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace artshield
