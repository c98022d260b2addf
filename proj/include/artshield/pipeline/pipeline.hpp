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

#ifndef ARTSHIELD_PIPELINE_PIPELINE_HPP_
#define ARTSHIELD_PIPELINE_PIPELINE_HPP_

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "artshield/eval/report.hpp"
#include "artshield/pipeline/dataset.hpp"
#include "artshield/pipeline/run_config.hpp"

namespace artshield {

enum class Stage { kProbe, kSelect, kProtect, kMimic, kEvaluate, kRobustness };

std::string_view StageName(Stage stage);
Stage ParseStage(std::string_view name);
// Comma-separated stage names, or "all".
std::set<Stage> ParseStages(std::string_view list);
const std::set<Stage>& AllStages();

struct PipelineResult {
  std::filesystem::path run_dir;
  // Aggregate report rows (evaluate and robustness), artist-major.
  std::vector<EvalReport> reports;
  // "<artist or global>/<stage>" for stages that ran or were reused.
  std::vector<std::string> executed;
  std::vector<std::string> cached;
  std::vector<std::string> warnings;
};

// Runs the requested stages into config.output_dir. A stage whose done
// marker matches the current config hash, seed and inputs is reused. A
// requested stage whose upstream artifacts are missing throws ConfigError.
PipelineResult RunPipeline(const DatasetManifest& manifest,
                           const RunConfig& config,
                           const std::set<Stage>& stages);

// Layout helpers shared with the CLI.
std::filesystem::path ArtistDir(const std::filesystem::path& run_dir,
                                std::string_view artist);
std::vector<ImageTensor> LoadPngSeries(const std::filesystem::path& dir,
                                       std::string_view prefix);

}  // namespace artshield

#endif  // ARTSHIELD_PIPELINE_PIPELINE_HPP_
