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

#include "artshield/pipeline/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "artshield/backend/toy_backbone.hpp"
#include "artshield/core/errors.hpp"
#include "artshield/core/hash.hpp"
#include "artshield/io/image_io.hpp"
#include "artshield/mimicry/mimicry.hpp"
#include "artshield/probe/attention_probe.hpp"
#include "artshield/protect/protect_engine.hpp"
#include "artshield/select/layer_select.hpp"

#ifndef ARTSHIELD_VERSION
#define ARTSHIELD_VERSION "dev"
#endif

namespace artshield {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kDoneFile = ".done";

struct Marker {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string inputs;

  json ToJson() const {
    return {{"config_hash", config_hash},
            {"seed", std::to_string(seed)},
            {"inputs", inputs}};
  }
};

bool MarkerMatches(const fs::path& dir, const Marker& m) {
  std::ifstream in(dir / kDoneFile);
  if (!in) return false;
  try {
    json j;
    in >> j;
    return j == m.ToJson();
  } catch (const json::exception&) {
    return false;
  }
}

void WriteMarker(const fs::path& dir, const Marker& m) {
  fs::create_directories(dir);
  std::ofstream(dir / kDoneFile) << m.ToJson().dump(2) << '\n';
}

void ClearStageDir(const fs::path& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir);
}

void WriteJson(const fs::path& path, const json& j) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json ReadJson(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  json j;
  in >> j;
  return j;
}

std::string HashImages(std::span<const ImageTensor> images,
                       std::string_view extra = {}) {
  Fnv1a h;
  for (const auto& img : images) h.UpdateValue(ContentHash(img));
  h.Update(extra);
  return HexDigest(h.digest());
}

std::string Fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void WritePngSeries(std::span<const ImageTensor> images, const fs::path& dir,
                    std::string_view prefix) {
  for (std::size_t i = 0; i < images.size(); ++i) {
    WritePng(images[i], dir / (std::string(prefix) + std::to_string(i) + ".png"));
  }
}

std::vector<ProbePrompt> ProbePrompts(ProbePromptSet set) {
  if (set == ProbePromptSet::kGrid) return ProbeGrid();
  std::vector<ProbePrompt> out;
  for (int c = 0; c < 2; ++c) {
    for (int a = 0; a < 3; ++a) {
      out.push_back(MakeProbePrompt(ProbeContents()[c], ProbeArtists()[a]));
    }
  }
  return out;
}

std::vector<LayerScore> ReadProbeScores(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<LayerScore> out;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 4) continue;
    LayerScore s;
    s.layer = CrossAttnLayerId::Parse(cells[0]);
    s.style_mean = std::stod(cells[1]);
    s.content_mean = std::stod(cells[2]);
    s.divergence = std::stod(cells[3]);
    out.push_back(s);
  }
  return out;
}

class Runner {
 public:
  Runner(const DatasetManifest& manifest, const RunConfig& config,
         const std::set<Stage>& stages)
      : manifest_(manifest),
        config_(config),
        stages_(stages),
        run_dir_(config.output_dir),
        hash_(config.Hash()),
        providers_(MakeProviders(config.providers)) {}

  PipelineResult Run();

 private:
  bool Requested(Stage s) const { return stages_.count(s) > 0; }
  Marker MakeMarker(std::string inputs) const {
    return {hash_, config_.seed, std::move(inputs)};
  }
  void Note(const std::string& what, bool ran) {
#pragma omp critical(artshield_pipeline_log)
    (ran ? result_.executed : result_.cached).push_back(what);
  }
  void Warn(const std::string& what) {
#pragma omp critical(artshield_pipeline_log)
    result_.warnings.push_back(what);
  }

  void ProbeStage();
  void SelectStage();
  std::vector<CrossAttnLayerId> Selection();
  void ClassExamples();
  void ArtistJob(const DatasetEntry& entry);
  std::vector<ImageTensor> ProtectStage(const DatasetEntry& entry,
                                        const std::vector<ImageTensor>& clean);
  std::vector<ImageTensor> MimicArm(const DatasetEntry& entry,
                                    const std::string& arm,
                                    std::span<const ImageTensor> training,
                                    bool run);
  void EvaluateStage(const DatasetEntry& entry,
                     const std::vector<ImageTensor>& clean);
  void RobustnessStage(const DatasetEntry& entry,
                       const std::vector<ImageTensor>& clean);
  std::optional<double> ProtectRuntime(const DatasetEntry& entry) const;
  void Aggregate();

  const DatasetManifest& manifest_;
  const RunConfig& config_;
  const std::set<Stage>& stages_;
  fs::path run_dir_;
  std::string hash_;
  ProviderSet providers_;
  std::unique_ptr<Backbone> original_;
  std::vector<ImageTensor> class_examples_;
  std::optional<std::vector<CrossAttnLayerId>> selection_;
  PipelineResult result_;
};

void Runner::ProbeStage() {
  const fs::path dir = run_dir_ / "probe";
  const Marker marker = MakeMarker(config_.backbone);
  if (MarkerMatches(dir, marker)) {
    Note("global/probe", false);
    return;
  }
  ClearStageDir(dir);
  ProbeConfig pc;
  pc.timesteps = config_.probe.timesteps;
  pc.sampler.steps = config_.sampler_steps;
  pc.seed = DeriveSeed(config_.seed, "probe");
  pc.mode = config_.probe.mode;
  const auto prompts = ProbePrompts(config_.probe.prompts);
  const ProbeReport report =
      RunProbe(*original_, prompts, providers_.style.get(), pc);
  for (const auto& w : report.warnings) Warn("probe: " + w);
  WriteProbeCsv(report, dir / "probe.csv");
  WriteProbeSvg(report, dir / "probe.svg");
  std::ofstream log(dir / "evaluations.csv");
  log << "prompt,timestep\n";
  for (const auto& [text, t] : report.evaluations) log << text << ',' << t << '\n';
  WriteMarker(dir, marker);
  Note("global/probe", true);
}

void Runner::SelectStage() {
  const fs::path dir = run_dir_ / "select";
  const fs::path probe_csv = run_dir_ / "probe" / "probe.csv";
  const SelectionPolicy policy = SelectionPolicy::Parse(config_.selection);
  const bool have_probe =
      MarkerMatches(run_dir_ / "probe", MakeMarker(config_.backbone));
  if (policy.mode == SelectionMode::kTopK && !have_probe) {
    throw ConfigError("select stage with " + policy.ToString() +
                      " needs probe results; add the probe stage");
  }
  const Marker marker =
      MakeMarker(have_probe ? HexDigest(HashString(
                                  [&] {
                                    std::ifstream in(probe_csv);
                                    std::stringstream ss;
                                    ss << in.rdbuf();
                                    return ss.str();
                                  }()))
                            : "no-probe");
  if (MarkerMatches(dir, marker)) {
    Note("global/select", false);
    return;
  }
  ClearStageDir(dir);
  std::vector<RankedLayer> ranking;
  if (have_probe) {
    const auto scores = ReadProbeScores(probe_csv);
    ranking = RankLayers(scores);
  }
  SelectionManifest m;
  m.policy = policy;
  m.backbone = config_.backbone;
  m.layers = SelectLayers(policy, ranking, original_->layer_ids());
  for (const auto& layer : m.layers) {
    for (const auto& r : ranking) {
      if (r.layer == layer) m.divergences.push_back(r.divergence);
    }
  }
  WriteJson(dir / "selection.json", ToJson(m));
  WriteMarker(dir, marker);
  Note("global/select", true);
}

std::vector<CrossAttnLayerId> Runner::Selection() {
  if (selection_) return *selection_;
  if (config_.selection == "explicit") {
    selection_ = config_.protect.selected_layers;
  } else if (fs::exists(run_dir_ / "select" / kDoneFile)) {
    selection_ = SelectionManifestFromJson(
                     ReadJson(run_dir_ / "select" / "selection.json"))
                     .layers;
  } else {
    const SelectionPolicy policy = SelectionPolicy::Parse(config_.selection);
    if (policy.mode == SelectionMode::kTopK) {
      throw ConfigError("protect needs a layer selection; run the select "
                        "stage first");
    }
    selection_ = ResolvePreset(policy.preset, original_->layer_ids());
  }
  return *selection_;
}

void Runner::ClassExamples() {
  const int n = config_.protect.num_class_examples;
  if (n == 0) return;
  SamplerOptions sampler;
  sampler.steps = config_.sampler_steps;
  class_examples_ = GenerateClassExamples(
      *original_, config_.protect.prior_prompt, n,
      StageSeed(config_.seed, "class", ""), sampler, run_dir_ / "cache");
}

std::vector<ImageTensor> Runner::ProtectStage(
    const DatasetEntry& entry, const std::vector<ImageTensor>& clean) {
  const fs::path dir = ArtistDir(run_dir_, entry.id) / "protect";
  const auto layers = Selection();
  std::string names;
  for (const auto& l : layers) names += l.canonical_name() + ";";
  const Marker marker = MakeMarker(HashImages(clean, names));
  const std::string what = entry.id + "/protect";
  if (MarkerMatches(dir, marker)) {
    Note(what, false);
    return LoadPngSeries(dir, "protected_");
  }
  if (!Requested(Stage::kProtect)) {
    throw ConfigError(what + " has no cached output; add the protect stage");
  }
  ClearStageDir(dir);
  auto backbone = MakeBackbone(config_.backbone);
  ProtectConfig pc = config_.protect;
  pc.seed = StageSeed(config_.seed, "protect", entry.id);
  pc.selected_layers = layers;
  const ProtectResult r = Protect(clean, *backbone, pc, class_examples_);
  for (const auto& w : r.warnings) Warn(what + ": " + w);
  std::vector<ImageTensor> out;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    ImageTensor q = QuantizeWithinBudget(r.images[i], clean[i], pc.budget);
    q.provenance = Provenance::kProtected;
    out.push_back(std::move(q));
  }
  WritePngSeries(out, dir, "protected_");
  json layer_names = json::array();
  for (const auto& l : layers) layer_names.push_back(l.canonical_name());
  for (std::size_t i = 0; i < out.size(); ++i) {
    WriteJson(dir / ("protected_" + std::to_string(i) + ".json"),
              {{"source", clean[i].tag},
               {"budget", pc.budget},
               {"step_size", pc.step_size},
               {"outer_iters", pc.outer_iters},
               {"inner_finetune_steps", pc.inner_finetune_steps},
               {"pgd_steps_per_outer", pc.pgd_steps_per_outer},
               {"selected_layers", layer_names},
               {"seed", std::to_string(pc.seed)},
               {"config_hash", hash_},
               {"code_version", ARTSHIELD_VERSION}});
  }
  std::ofstream log(dir / "log.csv");
  log << "outer,finetune_loss,adversarial_loss,surrogate_loss,linf,"
         "skipped_pgd_steps\n";
  log << "-1,," << Fmt(r.initial_adversarial_loss) << ",,0,0\n";
  for (const auto& e : r.log) {
    log << e.outer << ',' << Fmt(e.finetune_loss) << ','
        << Fmt(e.adversarial_loss) << ',' << Fmt(e.surrogate_loss) << ','
        << Fmt(e.linf) << ',' << e.skipped_pgd_steps << '\n';
  }
  WriteJson(dir / "timing.json",
            {{"wall_seconds", r.wall_seconds},
             {"seconds_per_image", r.wall_seconds / clean.size()}});
  WriteMarker(dir, marker);
  Note(what, true);
  return out;
}

std::vector<ImageTensor> Runner::MimicArm(const DatasetEntry& entry,
                                          const std::string& arm,
                                          std::span<const ImageTensor> training,
                                          bool run) {
  const fs::path dir = ArtistDir(run_dir_, entry.id) / "mimic" / arm;
  const Marker marker = MakeMarker(HashImages(training, arm));
  const std::string what = entry.id + "/mimic/" + arm;
  if (MarkerMatches(dir, marker)) {
    Note(what, false);
    return LoadPngSeries(dir, "gen_");
  }
  if (!run) {
    throw ConfigError(what + " has no cached output; add the mimic stage");
  }
  ClearStageDir(dir);
  auto attacker = MakeBackbone(config_.backbone);
  MimicryConfig mc = config_.mimic;
  mc.seed = StageSeed(config_.seed, "mimic", entry.id);
  mc.sampler.steps = config_.sampler_steps;
  const FinetuneResult ft = Finetune(*attacker, training, mc, class_examples_);
  const auto generated = Generate(*attacker, mc);
  WritePngSeries(generated, dir, "gen_");
  std::ofstream curve(dir / "finetune.csv");
  curve << "step,loss\n";
  for (std::size_t i = 0; i < ft.curve.size(); ++i) {
    curve << i << ',' << Fmt(ft.curve[i]) << '\n';
  }
  json images = json::array();
  for (std::size_t i = 0; i < generated.size(); ++i) {
    images.push_back({{"image", "gen_" + std::to_string(i) + ".png"},
                      {"prompt", mc.prompts[i]},
                      {"full_prompt", mc.GenerationPrompt(mc.prompts[i])},
                      {"source_subset", arm}});
  }
  WriteJson(dir / "manifest.json",
            {{"artist", entry.id},
             {"method", arm == "clean" ? "clean" : config_.method},
             {"initial_loss", ft.initial_loss},
             {"final_loss", ft.final_loss},
             {"finetune_steps", mc.finetune_steps},
             {"learning_rate", mc.learning_rate},
             {"scope", TrainScopeName(mc.scope)},
             {"seed", std::to_string(mc.seed)},
             {"images", images}});
  WriteMarker(dir, marker);
  Note(what, true);
  return generated;
}

std::optional<double> Runner::ProtectRuntime(const DatasetEntry& entry) const {
  const fs::path path = ArtistDir(run_dir_, entry.id) / "protect" / "timing.json";
  if (!fs::exists(path)) return std::nullopt;
  return ReadJson(path).at("seconds_per_image").get<double>();
}

void Runner::EvaluateStage(const DatasetEntry& entry,
                           const std::vector<ImageTensor>& clean) {
  const fs::path base = ArtistDir(run_dir_, entry.id);
  const auto prot = LoadPngSeries(base / "protect", "protected_");
  const auto gen_clean = MimicArm(entry, "clean", clean, false);
  const auto gen_prot = MimicArm(entry, "protected", prot, false);
  const fs::path dir = base / "evaluate";
  const std::string inputs =
      HashImages(clean) + HashImages(prot) + HashImages(gen_clean) +
      HashImages(gen_prot);
  const Marker marker = MakeMarker(HexDigest(HashString(inputs)));
  if (MarkerMatches(dir, marker)) {
    Note(entry.id + "/evaluate", false);
    return;
  }
  ClearStageDir(dir);
  auto [baseline, row] = EvaluateRun({clean, prot, gen_clean, gen_prot, clean},
                                     providers_, TransformTag::kNone,
                                     config_.method);
  baseline.artist = row.artist = entry.id;
  baseline.omitted["runtime_s_per_img"] = "no protection applied";
  row.runtime_s_per_img = ProtectRuntime(entry);
  const std::vector<EvalReport> rows = {baseline, row};
  WriteReportCsv(rows, dir / "report.csv");
  WriteTimingCsv(rows, dir / "timing.csv");
  WriteMarker(dir, marker);
  Note(entry.id + "/evaluate", true);
}

void Runner::RobustnessStage(const DatasetEntry& entry,
                             const std::vector<ImageTensor>& clean) {
  const fs::path base = ArtistDir(run_dir_, entry.id);
  const auto prot = LoadPngSeries(base / "protect", "protected_");
  const auto gen_prot = MimicArm(entry, "protected", prot, false);
  const fs::path dir = base / "robustness";
  std::string inputs = HashImages(clean) + HashImages(prot) + HashImages(gen_prot);
  for (TransformTag tag : config_.robustness) inputs += TransformTagName(tag);
  const Marker marker = MakeMarker(HexDigest(HashString(inputs)));
  if (MarkerMatches(dir, marker)) {
    Note(entry.id + "/robustness", false);
    return;
  }
  ClearStageDir(dir);
  std::vector<EvalReport> rows;
  auto evaluate = [&](TransformTag tag, std::span<const ImageTensor> used,
                      std::span<const ImageTensor> generated) {
    auto [baseline, row] = EvaluateRun({clean, used, {}, generated, clean},
                                       providers_, tag, config_.method);
    row.artist = entry.id;
    row.runtime_s_per_img = ProtectRuntime(entry);
    rows.push_back(row);
  };
  evaluate(TransformTag::kNone, prot, gen_prot);
  for (TransformTag tag : config_.robustness) {
    if (tag == TransformTag::kNone) continue;
    std::vector<ImageTensor> transformed;
    for (const auto& img : prot) transformed.push_back(ApplyTransform(img, tag));
    const std::string arm = "protected_" + std::string(TransformTagName(tag));
    const auto generated = MimicArm(entry, arm, transformed, true);
    evaluate(tag, transformed, generated);
  }
  WriteReportCsv(rows, dir / "report.csv");
  WriteTimingCsv(rows, dir / "timing.csv");
  WriteMarker(dir, marker);
  Note(entry.id + "/robustness", true);
}

void Runner::ArtistJob(const DatasetEntry& entry) {
  const int size = original_->image_geometry().height;
  const auto clean = LoadEntryImages(entry, size);
  const bool downstream = Requested(Stage::kMimic) ||
                          Requested(Stage::kEvaluate) ||
                          Requested(Stage::kRobustness);
  if (!Requested(Stage::kProtect) && !downstream) return;
  const auto prot = ProtectStage(entry, clean);
  if (Requested(Stage::kMimic)) {
    MimicArm(entry, "clean", clean, true);
    MimicArm(entry, "protected", prot, true);
  }
  if (Requested(Stage::kEvaluate)) EvaluateStage(entry, clean);
  if (Requested(Stage::kRobustness)) RobustnessStage(entry, clean);
}

void Runner::Aggregate() {
  std::vector<EvalReport> eval_rows, robust_rows;
  std::vector<EvalReport> timing_rows;
  auto timing_of = [](const fs::path& path) {
    std::map<std::string, double> out;
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      const auto last = line.rfind(',');
      if (last == std::string::npos || last + 1 == line.size()) continue;
      out[line.substr(0, last)] = std::stod(line.substr(last + 1));
    }
    return out;
  };
  for (const auto& entry : manifest_.entries) {
    const fs::path base = ArtistDir(run_dir_, entry.id);
    for (const auto& [name, rows] :
         {std::pair{"evaluate", &eval_rows}, std::pair{"robustness", &robust_rows}}) {
      const fs::path csv = base / name / "report.csv";
      if (!fs::exists(csv)) continue;
      const auto timing = timing_of(base / name / "timing.csv");
      for (EvalReport r : ReadReportCsv(csv)) {
        const std::string key = r.artist + "," + r.method + "," +
                                std::string(TransformTagName(r.transform));
        if (auto it = timing.find(key); it != timing.end()) {
          r.runtime_s_per_img = it->second;
        }
        rows->push_back(r);
      }
    }
  }
  if (!eval_rows.empty()) WriteReportCsv(eval_rows, run_dir_ / "report.csv");
  if (!robust_rows.empty()) {
    WriteReportCsv(robust_rows, run_dir_ / "robustness.csv");
  }
  std::vector<EvalReport> all = eval_rows;
  all.insert(all.end(), robust_rows.begin(), robust_rows.end());
  if (all.empty()) return;
  WriteTimingCsv(all, run_dir_ / "timing.csv");
  std::ofstream summary(run_dir_ / "summary.md");
  summary << "# Run summary\n\n"
          << "config hash: `" << hash_ << "`, seed " << config_.seed
          << ", backbone " << config_.backbone << "\n\n"
          << SummaryTable(all);
  result_.reports = all;
}

PipelineResult Runner::Run() {
  config_.Validate();
  result_.run_dir = run_dir_;
  fs::create_directories(run_dir_);
  json cfg = ToJson(config_);
  cfg["config_hash"] = hash_;
  cfg.erase("output_dir");
  WriteJson(run_dir_ / "config.json", cfg);
  WriteJson(run_dir_ / "dataset.json", ToJson(manifest_));
  original_ = MakeBackbone(config_.backbone);

  if (Requested(Stage::kProbe)) ProbeStage();
  if (Requested(Stage::kSelect)) SelectStage();
  const bool artist_work = Requested(Stage::kProtect) ||
                           Requested(Stage::kMimic) ||
                           Requested(Stage::kEvaluate) ||
                           Requested(Stage::kRobustness);
  if (!artist_work) return result_;
  Selection();
  if (Requested(Stage::kProtect) || Requested(Stage::kMimic) ||
      Requested(Stage::kRobustness)) {
    ClassExamples();
  }

  const auto& entries = manifest_.entries;
  std::vector<std::exception_ptr> errors(entries.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < entries.size(); ++i) {
    try {
      ArtistJob(entries[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  Aggregate();
  return result_;
}

}  // namespace

std::string_view StageName(Stage stage) {
  switch (stage) {
    case Stage::kProbe:
      return "probe";
    case Stage::kSelect:
      return "select";
    case Stage::kProtect:
      return "protect";
    case Stage::kMimic:
      return "mimic";
    case Stage::kEvaluate:
      return "evaluate";
    case Stage::kRobustness:
      return "robustness";
  }
  return "";
}

Stage ParseStage(std::string_view name) {
  for (Stage s : AllStages()) {
    if (StageName(s) == name) return s;
  }
  throw ConfigError("unknown stage: " + std::string(name));
}

const std::set<Stage>& AllStages() {
  static const std::set<Stage> kAll = {Stage::kProbe,   Stage::kSelect,
                                       Stage::kProtect, Stage::kMimic,
                                       Stage::kEvaluate, Stage::kRobustness};
  return kAll;
}

std::set<Stage> ParseStages(std::string_view list) {
  if (list == "all") return AllStages();
  std::set<Stage> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t end = std::min(list.find(',', start), list.size());
    const std::string_view item = list.substr(start, end - start);
    if (!item.empty()) out.insert(ParseStage(item));
    start = end + 1;
  }
  if (out.empty()) throw ConfigError("no stages given");
  return out;
}

fs::path ArtistDir(const fs::path& run_dir, std::string_view artist) {
  return run_dir / "artists" / std::string(artist);
}

std::vector<ImageTensor> LoadPngSeries(const fs::path& dir,
                                       std::string_view prefix) {
  std::vector<ImageTensor> out;
  for (int i = 0;; ++i) {
    const fs::path p = dir / (std::string(prefix) + std::to_string(i) + ".png");
    if (!fs::exists(p)) break;
    out.push_back(ReadImage(p));
  }
  if (out.empty()) {
    throw NotFoundError("no " + std::string(prefix) + "*.png images in " +
                        dir.string());
  }
  return out;
}

PipelineResult RunPipeline(const DatasetManifest& manifest,
                           const RunConfig& config,
                           const std::set<Stage>& stages) {
  Runner runner(manifest, config, stages);
  return runner.Run();
}

}  // namespace artshield
