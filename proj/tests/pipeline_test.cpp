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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "artshield/core/errors.hpp"
#include "artshield/core/image.hpp"
#include "artshield/io/image_io.hpp"
#include "artshield/pipeline/compare.hpp"
#include "artshield/pipeline/dataset.hpp"
#include "artshield/pipeline/pipeline.hpp"
#include "artshield/pipeline/run_config.hpp"

namespace artshield {
namespace {

namespace fs = std::filesystem;

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("artshield_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteImages(const fs::path& dir, int count) {
  fs::create_directories(dir);
  for (int i = 0; i < count; ++i) {
    WritePng(SyntheticArtwork(0, i, 16), dir / ("img_" + std::to_string(i) + ".png"));
  }
}

// Small enough for the whole pipeline to run in seconds.
RunConfig TinyConfig(const fs::path& out) {
  RunConfig cfg;
  cfg.backbone = "toy";
  cfg.output_dir = out;
  cfg.selection = "top_k:1";
  cfg.sampler_steps = 4;
  cfg.probe.prompts = ProbePromptSet::kCompact;
  cfg.protect.outer_iters = 2;
  cfg.protect.inner_finetune_steps = 1;
  cfg.protect.num_class_examples = 2;
  cfg.protect.eval_draws = 2;
  cfg.mimic.finetune_steps = 3;
  cfg.mimic.eval_draws = 2;
  return cfg;
}

TEST(IngestTest, ThirtyArtistsOfFour) {
  const fs::path root = TempDir("ingest30");
  for (int a = 0; a < 30; ++a) {
    WriteImages(root / "wikiart_refined" / ("artist_" + std::to_string(a)), 4);
  }
  const auto m = Ingest(root);
  ASSERT_EQ(m.entries.size(), 30u);
  for (const auto& e : m.entries) {
    EXPECT_EQ(e.images.size(), 4u);
    EXPECT_EQ(e.source, SourceTag::kWikiartRefined);
  }
  fs::remove_all(root);
}

TEST(IngestTest, SingleImageFolderSkippedAndAnimeTagged) {
  const fs::path root = TempDir("ingest_skip");
  WriteImages(root / "custom" / "lonely", 1);
  for (int s = 0; s < 5; ++s) {
    WriteImages(root / "anita" / ("style_" + std::to_string(s)), 3);
  }
  const auto m = Ingest(root);
  ASSERT_EQ(m.entries.size(), 5u);
  for (const auto& e : m.entries) EXPECT_EQ(e.source, SourceTag::kAnita);
  ASSERT_EQ(m.diagnostics.size(), 1u);
  EXPECT_NE(m.diagnostics[0].find("lonely"), std::string::npos);
  EXPECT_THROW(m.Find("lonely"), NotFoundError);
  fs::remove_all(root);
}

TEST(IngestTest, SourceFileTagsFolder) {
  const fs::path root = TempDir("ingest_source");
  WriteImages(root / "mystyle", 3);
  std::ofstream(root / "mystyle" / "SOURCE") << "anita\n";
  EXPECT_EQ(Ingest(root).Find("mystyle").source, SourceTag::kAnita);
  fs::remove_all(root);
}

TEST(IngestTest, EmptyRootAndBadFilesThrow) {
  const fs::path root = TempDir("ingest_empty");
  EXPECT_THROW(Ingest(root), NotFoundError);
  EXPECT_THROW(Ingest(root / "missing"), NotFoundError);
  WriteImages(root / "a", 2);
  std::ofstream(root / "a" / "img_9.png").close();
  EXPECT_THROW(Ingest(root), IoError);
  fs::remove_all(root);
}

TEST(RunConfigTest, JsonRoundTripAndUnknownKey) {
  RunConfig cfg = TinyConfig("runs/x");
  cfg.seed = 17;
  cfg.protect.budget = 0.08;
  const RunConfig back = RunConfigFromJson(ToJson(cfg));
  EXPECT_EQ(ToJson(back).dump(), ToJson(cfg).dump());
  EXPECT_EQ(back.Hash(), cfg.Hash());
  nlohmann::json j = ToJson(cfg);
  j["protect"]["budgett"] = 0.1;
  EXPECT_THROW(RunConfigFromJson(j), ConfigError);
  RunConfig reseeded = cfg;
  reseeded.seed = 18;
  reseeded.output_dir = "elsewhere";
  EXPECT_EQ(reseeded.Hash(), cfg.Hash());
  reseeded.protect.budget = 0.1;
  EXPECT_NE(reseeded.Hash(), cfg.Hash());
}

TEST(StageTest, ParseStages) {
  EXPECT_EQ(ParseStages("all"), AllStages());
  EXPECT_EQ(ParseStages("probe,select"),
            (std::set<Stage>{Stage::kProbe, Stage::kSelect}));
  EXPECT_THROW(ParseStages("probe,attack"), ConfigError);
}

class PipelineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { manifest_ = Ingest(ARTSHIELD_FIXTURE_DIR); }
  static DatasetManifest manifest_;
};

DatasetManifest PipelineTest::manifest_;

TEST_F(PipelineTest, ProbeAndSelectOnlyTouchNoImages) {
  const fs::path out = TempDir("pipe_probe");
  const auto r = RunPipeline(manifest_, TinyConfig(out),
                             {Stage::kProbe, Stage::kSelect});
  EXPECT_TRUE(fs::exists(out / "probe" / "probe.csv"));
  EXPECT_TRUE(fs::exists(out / "select" / "selection.json"));
  EXPECT_FALSE(fs::exists(out / "artists"));
  EXPECT_TRUE(r.reports.empty());
  fs::remove_all(out);
}

TEST_F(PipelineTest, MissingUpstreamThrows) {
  const fs::path out = TempDir("pipe_upstream");
  EXPECT_THROW(RunPipeline(manifest_, TinyConfig(out), {Stage::kMimic}),
               ConfigError);
  fs::remove_all(out);
}

TEST_F(PipelineTest, FullRunResumesAndCompares) {
  ASSERT_EQ(manifest_.entries.size(), 2u);
  const fs::path out = TempDir("pipe_full");
  const RunConfig cfg = TinyConfig(out);
  const auto first = RunPipeline(manifest_, cfg, AllStages());
  EXPECT_TRUE(fs::exists(out / "report.csv"));
  EXPECT_TRUE(fs::exists(out / "summary.md"));
  for (const auto& e : manifest_.entries) {
    const auto rows = ReadReportCsv(ArtistDir(out, e.id) / "robustness" / "report.csv");
    ASSERT_EQ(rows.size(), 3u) << e.id;
    EXPECT_EQ(rows[0].transform, TransformTag::kNone);
    EXPECT_EQ(rows[1].transform, TransformTag::kJpeg75);
    EXPECT_EQ(rows[2].transform, TransformTag::kBlur3);
    const auto prot = LoadPngSeries(ArtistDir(out, e.id) / "protect", "protected_");
    EXPECT_EQ(prot.size(), e.images.size());
  }
  const std::string report = ReadFile(out / "report.csv");
  const std::string robust = ReadFile(out / "robustness.csv");

  const auto second = RunPipeline(manifest_, cfg, AllStages());
  EXPECT_TRUE(second.executed.empty());
  EXPECT_FALSE(second.cached.empty());
  EXPECT_EQ(ReadFile(out / "report.csv"), report);
  EXPECT_EQ(ReadFile(out / "robustness.csv"), robust);

  // Same config in a second directory reproduces every metric.
  const fs::path out2 = TempDir("pipe_full2");
  RunConfig cfg2 = cfg;
  cfg2.output_dir = out2;
  RunPipeline(manifest_, cfg2, AllStages());
  EXPECT_EQ(ReadFile(out2 / "report.csv"), report);

  const std::vector<fs::path> one = {out};
  const auto single = CompareReport(one);
  ASSERT_EQ(single.rows.size(), 2u);
  EXPECT_EQ(single.rows[0].method, "clean");
  EXPECT_EQ(single.rows[0].metrics.at("psnr_db"), 100.0);
  EXPECT_EQ(single.rows[0].metrics.at("ssim"), 1.0);
  EXPECT_EQ(single.rows[0].metrics.at("lpips"), 0.0);

  const std::vector<fs::path> both = {out, out2};
  const auto pair = CompareReport(both);
  ASSERT_EQ(pair.rows.size(), 3u);
  EXPECT_NE(pair.rows[1].method, pair.rows[2].method);
  // Runtime is wall-clock; every other metric must replay exactly.
  auto deterministic = [](std::map<std::string, double> m) {
    m.erase("runtime_s_per_img");
    return m;
  };
  EXPECT_EQ(deterministic(pair.rows[1].metrics),
            deterministic(pair.rows[2].metrics));
  const std::string table = RenderComparison(pair);
  EXPECT_NE(table.find("**"), std::string::npos);

  std::ofstream(out2 / "report.csv") << "artist,method\n";
  EXPECT_THROW(CompareReport(both), ConfigError);
  fs::remove_all(out);
  fs::remove_all(out2);
}

TEST_F(PipelineTest, SeedChangesImagesButNotConfigHash) {
  const fs::path a = TempDir("pipe_seed_a");
  const fs::path b = TempDir("pipe_seed_b");
  RunConfig ca = TinyConfig(a);
  RunConfig cb = TinyConfig(b);
  cb.seed = ca.seed + 1;
  const std::set<Stage> stages = {Stage::kProbe, Stage::kSelect, Stage::kProtect,
                                  Stage::kMimic};
  RunPipeline(manifest_, ca, stages);
  RunPipeline(manifest_, cb, stages);
  EXPECT_EQ(ca.Hash(), cb.Hash());
  const auto& id = manifest_.entries[0].id;
  const fs::path gen = fs::path("mimic") / "protected" / "gen_0.png";
  EXPECT_NE(ReadFile(ArtistDir(a, id) / gen), ReadFile(ArtistDir(b, id) / gen));
  EXPECT_EQ(ReadFile(a / "dataset.json"), ReadFile(b / "dataset.json"));
  fs::remove_all(a);
  fs::remove_all(b);
}

}  // namespace
}  // namespace artshield
