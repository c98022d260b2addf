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

#include "artshield/pipeline/run_config.hpp"

#include <cstdlib>
#include <fstream>

#include "artshield/core/errors.hpp"
#include "artshield/core/hash.hpp"

namespace artshield {
namespace {

using nlohmann::json;

json LayersJson(const std::vector<CrossAttnLayerId>& layers) {
  json out = json::array();
  for (const auto& l : layers) out.push_back(l.canonical_name());
  return out;
}

std::vector<CrossAttnLayerId> LayersFromJson(const json& j) {
  std::vector<CrossAttnLayerId> out;
  for (const auto& name : j) {
    out.push_back(CrossAttnLayerId::Parse(name.get<std::string>()));
  }
  return out;
}

void CheckKeys(const json& j, std::initializer_list<std::string_view> allowed,
               std::string_view where) {
  if (!j.is_object()) {
    throw ConfigError(std::string(where) + " must be a JSON object");
  }
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) {
      throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <typename T>
void Read(const json& j, const char* key, T& into) {
  if (j.contains(key)) into = j.at(key).get<T>();
}

json ProtectJson(const ProtectConfig& p) {
  return {{"budget", p.budget},
          {"step_size", p.step_size},
          {"outer_iters", p.outer_iters},
          {"inner_finetune_steps", p.inner_finetune_steps},
          {"pgd_steps_per_outer", p.pgd_steps_per_outer},
          {"lambda", p.lambda},
          {"selected_layers", LayersJson(p.selected_layers)},
          {"instance_prompt", p.instance_prompt},
          {"prior_prompt", p.prior_prompt},
          {"finetune_learning_rate", p.finetune_learning_rate},
          {"num_class_examples", p.num_class_examples},
          {"ascend_prior_term", p.ascend_prior_term},
          {"eval_draws", p.eval_draws}};
}

ProtectConfig ProtectFromJson(const json& j) {
  CheckKeys(j,
            {"budget", "step_size", "outer_iters", "inner_finetune_steps",
             "pgd_steps_per_outer", "lambda", "selected_layers",
             "instance_prompt", "prior_prompt", "finetune_learning_rate",
             "num_class_examples", "ascend_prior_term", "eval_draws"},
            "protect");
  ProtectConfig p;
  Read(j, "budget", p.budget);
  // The step defaults to a tenth of the budget unless given.
  p.step_size = p.budget / 10.0;
  Read(j, "step_size", p.step_size);
  Read(j, "outer_iters", p.outer_iters);
  Read(j, "inner_finetune_steps", p.inner_finetune_steps);
  Read(j, "pgd_steps_per_outer", p.pgd_steps_per_outer);
  Read(j, "lambda", p.lambda);
  if (j.contains("selected_layers")) {
    p.selected_layers = LayersFromJson(j["selected_layers"]);
  }
  Read(j, "instance_prompt", p.instance_prompt);
  Read(j, "prior_prompt", p.prior_prompt);
  Read(j, "finetune_learning_rate", p.finetune_learning_rate);
  Read(j, "num_class_examples", p.num_class_examples);
  Read(j, "ascend_prior_term", p.ascend_prior_term);
  Read(j, "eval_draws", p.eval_draws);
  return p;
}

json MimicJson(const MimicryConfig& m) {
  return {{"pseudo_token", m.pseudo_token},
          {"finetune_steps", m.finetune_steps},
          {"learning_rate", m.learning_rate},
          {"prompts", m.prompts},
          {"lambda", m.lambda},
          {"prior_prompt", m.prior_prompt},
          {"instance_template", m.instance_template},
          {"generation_template", m.generation_template},
          {"scope", TrainScopeName(m.scope)},
          {"selected_layers", LayersJson(m.selected_layers)},
          {"eval_draws", m.eval_draws}};
}

MimicryConfig MimicFromJson(const json& j) {
  CheckKeys(j,
            {"pseudo_token", "finetune_steps", "learning_rate", "prompts",
             "lambda", "prior_prompt", "instance_template",
             "generation_template", "scope", "selected_layers", "eval_draws"},
            "mimic");
  MimicryConfig m;
  Read(j, "pseudo_token", m.pseudo_token);
  Read(j, "finetune_steps", m.finetune_steps);
  Read(j, "learning_rate", m.learning_rate);
  Read(j, "prompts", m.prompts);
  Read(j, "lambda", m.lambda);
  Read(j, "prior_prompt", m.prior_prompt);
  Read(j, "instance_template", m.instance_template);
  Read(j, "generation_template", m.generation_template);
  if (j.contains("scope")) {
    m.scope = ParseTrainScope(j["scope"].get<std::string>());
  }
  if (j.contains("selected_layers")) {
    m.selected_layers = LayersFromJson(j["selected_layers"]);
  }
  Read(j, "eval_draws", m.eval_draws);
  return m;
}

// Always fails; stands in for a provider whose weights are not bundled.
class UnavailableProvider : public StyleDescriptorProvider,
                            public PerceptualDistanceProvider,
                            public FeatureProvider {
 public:
  explicit UnavailableProvider(std::string id) : id_(std::move(id)) {}
  std::string name() const override { return id_; }
  std::vector<double> Describe(const ImageTensor&) const override { Fail(); }
  double Distance(const ImageTensor&, const ImageTensor&) const override {
    Fail();
  }
  int dim() const override { return 1; }
  std::vector<double> Embed(const ImageTensor&) const override { Fail(); }

 private:
  [[noreturn]] void Fail() const {
    throw ProviderError("provider '" + id_ +
                        "' is not available in this build (cache dir " +
                        ProviderCacheDir().string() + ")");
  }
  std::string id_;
};

}  // namespace

void RunConfig::Validate() const {
  if (backbone.empty()) throw ConfigError("backbone must be set");
  if (method.empty() || method == "clean") {
    throw ConfigError("method label must be set and differ from 'clean'");
  }
  if (sampler_steps < 1) throw ConfigError("sampler_steps must be >= 1");
  if (selection == "explicit") {
    if (protect.selected_layers.empty()) {
      throw ConfigError("explicit selection needs protect.selected_layers");
    }
  } else {
    SelectionPolicy::Parse(selection);
  }
  protect.Validate();
  mimic.Validate();
}

std::string RunConfig::Hash() const {
  json j = ToJson(*this);
  j.erase("seed");
  j.erase("output_dir");
  return HexDigest(HashString(j.dump()));
}

json ToJson(const RunConfig& c) {
  json robustness = json::array();
  for (auto t : c.robustness) robustness.push_back(TransformTagName(t));
  return {
      {"backbone", c.backbone},
      {"seed", c.seed},
      {"output_dir", c.output_dir.generic_string()},
      {"method", c.method},
      {"selection", c.selection},
      {"sampler_steps", c.sampler_steps},
      {"probe",
       {{"prompts", c.probe.prompts == ProbePromptSet::kGrid ? "grid"
                                                              : "compact"},
        {"timesteps", c.probe.timesteps},
        {"mode", DivergenceModeName(c.probe.mode)}}},
      {"protect", ProtectJson(c.protect)},
      {"mimic", MimicJson(c.mimic)},
      {"providers",
       {{"style", c.providers.style},
        {"perceptual", c.providers.perceptual},
        {"features", c.providers.features}}},
      {"robustness", robustness},
  };
}

RunConfig RunConfigFromJson(const json& j) {
  CheckKeys(j,
            {"backbone", "seed", "output_dir", "method", "selection",
             "sampler_steps", "probe", "protect", "mimic", "providers",
             "robustness"},
            "run config");
  RunConfig c;
  try {
    Read(j, "backbone", c.backbone);
    Read(j, "seed", c.seed);
    if (j.contains("output_dir")) {
      c.output_dir = j["output_dir"].get<std::string>();
    }
    Read(j, "method", c.method);
    Read(j, "selection", c.selection);
    Read(j, "sampler_steps", c.sampler_steps);
    if (j.contains("probe")) {
      const json& p = j["probe"];
      CheckKeys(p, {"prompts", "timesteps", "mode"}, "probe");
      if (p.contains("prompts")) {
        const auto name = p["prompts"].get<std::string>();
        if (name == "grid") {
          c.probe.prompts = ProbePromptSet::kGrid;
        } else if (name == "compact") {
          c.probe.prompts = ProbePromptSet::kCompact;
        } else {
          throw ConfigError("probe.prompts must be 'grid' or 'compact'");
        }
      }
      Read(p, "timesteps", c.probe.timesteps);
      if (p.contains("mode")) {
        c.probe.mode = ParseDivergenceMode(p["mode"].get<std::string>());
      }
    }
    if (j.contains("protect")) c.protect = ProtectFromJson(j["protect"]);
    if (j.contains("mimic")) c.mimic = MimicFromJson(j["mimic"]);
    if (j.contains("providers")) {
      const json& p = j["providers"];
      CheckKeys(p, {"style", "perceptual", "features"}, "providers");
      Read(p, "style", c.providers.style);
      Read(p, "perceptual", c.providers.perceptual);
      Read(p, "features", c.providers.features);
    }
    if (j.contains("robustness")) {
      c.robustness.clear();
      for (const auto& t : j["robustness"]) {
        c.robustness.push_back(ParseTransformTag(t.get<std::string>()));
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad run config: ") + e.what());
  }
  c.Validate();
  return c;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
  return RunConfigFromJson(j);
}

std::uint64_t StageSeed(std::uint64_t global, std::string_view stage,
                        std::string_view artist) {
  return DeriveSeed(DeriveSeed(global, stage), artist);
}

std::filesystem::path ProviderCacheDir() {
  if (const char* env = std::getenv("ARTSHIELD_PROVIDER_CACHE")) {
    if (*env != '\0') return env;
  }
  if (const char* home = std::getenv("HOME")) {
    return std::filesystem::path(home) / ".cache" / "artshield";
  }
  return ".artshield-cache";
}

ProviderSet MakeProviders(const ProviderIds& ids) {
  ProviderSet set;
  const ProviderSet stubs = StubProviders();
  if (ids.style == "stub") {
    set.style = stubs.style;
  } else if (ids.style != "none") {
    set.style = std::make_shared<UnavailableProvider>(ids.style);
  }
  if (ids.perceptual == "stub") {
    set.perceptual = stubs.perceptual;
  } else if (ids.perceptual != "none") {
    set.perceptual = std::make_shared<UnavailableProvider>(ids.perceptual);
  }
  if (ids.features == "stub") {
    set.features = stubs.features;
  } else if (ids.features != "none") {
    set.features = std::make_shared<UnavailableProvider>(ids.features);
  }
  return set;
}

}  // namespace artshield
