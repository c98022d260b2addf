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

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "artshield/backend/toy_backbone.hpp"
#include "artshield/core/errors.hpp"
#include "artshield/pipeline/compare.hpp"
#include "artshield/pipeline/dataset.hpp"
#include "artshield/pipeline/pipeline.hpp"
#include "artshield/pipeline/run_config.hpp"

namespace fs = std::filesystem;
using namespace artshield;

namespace {

// Flags shared by every stage-running subcommand.
struct CommonFlags {
  std::string config;
  std::string dataset;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> backbone;
  std::optional<std::string> selection;
  std::optional<double> budget;
  std::optional<int> outer_iters;
  std::optional<int> attack_steps;
  std::optional<int> class_examples;
  std::optional<int> sampler_steps;
  std::optional<std::string> probe_prompts;
  std::string stages = "all";
};

void AddCommon(CLI::App* app, CommonFlags& f, bool needs_dataset) {
  app->add_option("-c,--config", f.config, "JSON run config");
  auto* ds = app->add_option("-d,--dataset", f.dataset,
                             "Dataset root (one folder per artist)");
  if (needs_dataset) ds->required();
  app->add_option("-o,--out", f.out, "Run directory (overrides config)");
  app->add_option("--seed", f.seed, "Global seed");
  app->add_option("--backbone", f.backbone, "Backbone id");
  app->add_option("--selection", f.selection,
                  "Layer policy: paper_top4, top1, mid5, top_k:<k>, explicit");
  app->add_option("--budget", f.budget, "L-inf budget on [0, 1]");
  app->add_option("--outer-iters", f.outer_iters, "Protection outer iterations");
  app->add_option("--attack-steps", f.attack_steps, "Attacker fine-tune steps");
  app->add_option("--class-examples", f.class_examples,
                  "Prior-preservation class examples");
  app->add_option("--sampler-steps", f.sampler_steps, "DDIM steps");
  app->add_option("--probe-prompts", f.probe_prompts, "grid or compact");
}

RunConfig BuildConfig(const CommonFlags& f) {
  nlohmann::json j = nlohmann::json::object();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw IoError("cannot read config " + f.config);
    in >> j;
  }
  if (!f.out.empty()) j["output_dir"] = f.out;
  if (f.seed) j["seed"] = *f.seed;
  if (f.backbone) j["backbone"] = *f.backbone;
  if (f.selection) j["selection"] = *f.selection;
  if (f.sampler_steps) j["sampler_steps"] = *f.sampler_steps;
  if (f.probe_prompts) j["probe"]["prompts"] = *f.probe_prompts;
  if (f.budget) {
    j["protect"]["budget"] = *f.budget;
    if (!j["protect"].contains("step_size")) {
      j["protect"]["step_size"] = *f.budget / 10.0;
    }
  }
  if (f.outer_iters) j["protect"]["outer_iters"] = *f.outer_iters;
  if (f.class_examples) j["protect"]["num_class_examples"] = *f.class_examples;
  if (f.attack_steps) j["mimic"]["finetune_steps"] = *f.attack_steps;
  return RunConfigFromJson(j);
}

int RunStages(const CommonFlags& f, const std::set<Stage>& stages) {
  const RunConfig config = BuildConfig(f);
  DatasetManifest manifest;
  if (!f.dataset.empty()) {
    manifest = Ingest(f.dataset);
    for (const auto& d : manifest.diagnostics) std::cerr << "dataset: " << d << '\n';
  }
  const PipelineResult r = RunPipeline(manifest, config, stages);
  for (const auto& s : r.executed) std::cout << "ran     " << s << '\n';
  for (const auto& s : r.cached) std::cout << "cached  " << s << '\n';
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "run directory: " << r.run_dir.string() << '\n';
  if (!r.reports.empty()) std::cout << '\n' << SummaryTable(r.reports);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Style protection against diffusion-model mimicry"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ARTSHIELD_VERSION);

  CommonFlags analyze, protect, mimic, evaluate, robustness, pipeline;
  auto* a = app.add_subcommand("analyze-layers",
                               "Probe cross-attention layers and select");
  AddCommon(a, analyze, false);
  auto* p = app.add_subcommand("protect", "Protect each artist's images");
  AddCommon(p, protect, true);
  auto* m = app.add_subcommand("mimic", "Fine-tune attackers on clean and "
                                        "protected images and generate");
  AddCommon(m, mimic, true);
  auto* e = app.add_subcommand("evaluate", "Score invisibility and protection");
  AddCommon(e, evaluate, true);
  auto* r = app.add_subcommand("robustness",
                               "Re-attack JPEG and blurred protected images");
  AddCommon(r, robustness, true);
  auto* pl = app.add_subcommand("pipeline", "Run several stages in order");
  AddCommon(pl, pipeline, true);
  pl->add_option("--stages", pipeline.stages,
                 "Comma-separated stages or 'all'");

  std::vector<std::string> compare_runs;
  std::string compare_out;
  auto* cmp = app.add_subcommand("compare", "Compare run reports");
  cmp->add_option("runs", compare_runs, "Run directories")->required();
  cmp->add_option("-o,--out", compare_out, "Write the table to a file");

  std::string export_id = "toy-paper", export_out;
  auto* ex = app.add_subcommand("export-weights",
                                "Write a backbone's seeded weights");
  ex->add_option("--backbone", export_id, "Backbone id");
  ex->add_option("-o,--out", export_out, "Output file (default data dir)");

  std::string fixture_out = "fixtures";
  int fixture_artists = 2, fixture_images = 4, fixture_size = 64;
  auto* fx = app.add_subcommand("make-fixtures",
                                "Write synthetic artist folders");
  fx->add_option("-o,--out", fixture_out, "Output directory");
  fx->add_option("--artists", fixture_artists, "Artist folders");
  fx->add_option("--images", fixture_images, "Images per artist");
  fx->add_option("--size", fixture_size, "Image side length");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*a) return RunStages(analyze, {Stage::kProbe, Stage::kSelect});
    if (*p) return RunStages(protect, {Stage::kProtect});
    if (*m) return RunStages(mimic, {Stage::kMimic});
    if (*e) return RunStages(evaluate, {Stage::kEvaluate});
    if (*r) return RunStages(robustness, {Stage::kRobustness});
    if (*pl) return RunStages(pipeline, ParseStages(pipeline.stages));
    if (*cmp) {
      std::vector<fs::path> dirs(compare_runs.begin(), compare_runs.end());
      const std::string table = RenderComparison(CompareReport(dirs));
      if (compare_out.empty()) {
        std::cout << table;
      } else {
        std::ofstream(compare_out) << table;
      }
      return 0;
    }
    if (*ex) {
      auto backbone = MakeBackbone(export_id);
      const fs::path out =
          export_out.empty() ? WeightsPath(export_id) : fs::path(export_out);
      if (out.has_parent_path()) fs::create_directories(out.parent_path());
      backbone->params().Save(out);
      std::cout << "wrote " << out.string() << '\n';
      return 0;
    }
    if (*fx) {
      WriteSyntheticFixtures(fixture_out, fixture_artists, fixture_images,
                             fixture_size);
      return 0;
    }
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return 0;
}
