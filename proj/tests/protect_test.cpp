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
#include <limits>
#include <optional>

#include "artshield/backend/toy_backbone.hpp"
#include "artshield/core/errors.hpp"
#include "artshield/protect/losses.hpp"
#include "artshield/protect/protect_engine.hpp"
#include "artshield/select/layer_select.hpp"
#include "test_util.hpp"

namespace artshield {
namespace {

using testing::InteriorImage;
using testing::RelativeError;

// Toy backbone whose noise prediction can be replaced by a fixed latent.
class RiggedBackbone : public ToyBackbone {
 public:
  RiggedBackbone() : ToyBackbone(ToyBackboneConfig::Compact()) {}

  std::optional<LatentImage> forced;

  NoisePrediction PredictNoise(const LatentImage& z_t, int t,
                               const PromptEmbedding& c, bool capture,
                               bool retain_cache) const override {
    NoisePrediction out =
        ToyBackbone::PredictNoise(z_t, t, c, capture, retain_cache);
    if (forced) out.noise = *forced;
    return out;
  }
};

LatentImage Filled(const LatentGeometry& g, double v) {
  LatentImage z = LatentImage::Zeros(g);
  std::fill(z.data.begin(), z.data.end(), v);
  return z;
}

double MeanSquaredGap(const LatentImage& eps, double c) {
  double s = 0.0;
  for (double e : eps.data) s += (e - c) * (e - c);
  return s / eps.data.size();
}

TEST(LdmLossTest, PerfectPredictionIsZero) {
  RiggedBackbone bb;
  Rng rng(1);
  const NoiseDraw draw = SampleNoiseDraw(bb, rng);
  bb.forced = draw.eps;
  const auto prompt = bb.EmbedPrompt("a painting");
  const LatentImage z0 = SampleNormalLatent(bb.latent_geometry(), rng);
  EXPECT_EQ(LdmLoss(bb, z0, prompt, draw, {}).value, 0.0);
}

TEST(LdmLossTest, ConstantOffsetGivesOne) {
  RiggedBackbone bb;
  Rng rng(2);
  const NoiseDraw draw = SampleNoiseDraw(bb, rng);
  LatentImage shifted = draw.eps;
  for (double& v : shifted.data) v += 1.0;
  bb.forced = shifted;
  const auto prompt = bb.EmbedPrompt("a painting");
  const LatentImage z0 = SampleNormalLatent(bb.latent_geometry(), rng);
  EXPECT_NEAR(LdmLoss(bb, z0, prompt, draw, {}).value, 1.0, 1e-12);
}

TEST(LdmLossTest, ShapeMismatchThrows) {
  auto bb = MakeBackbone("toy");
  Rng rng(3);
  NoiseDraw draw = SampleNoiseDraw(*bb, rng);
  draw.eps.data.pop_back();
  const auto prompt = bb->EmbedPrompt("a painting");
  const LatentImage z0 = SampleNormalLatent(bb->latent_geometry(), rng);
  EXPECT_THROW(LdmLoss(*bb, z0, prompt, draw, {}), DimensionError);
}

TEST(LdmLossTest, LatentGradientMatchesFiniteDifferences) {
  auto bb = MakeBackbone("toy");
  Rng rng(4);
  const NoiseDraw draw = SampleNoiseDraw(*bb, rng);
  const auto prompt = bb->EmbedPrompt("a painting in sks style");
  LatentImage z0 = SampleNormalLatent(bb->latent_geometry(), rng);
  const auto r = LdmLoss(*bb, z0, prompt, draw, {.input = true});
  const double h = 1e-4;
  for (int k = 0; k < 5; ++k) {
    const int i = rng.UniformInt(static_cast<int>(z0.data.size()));
    LatentImage plus = z0, minus = z0;
    plus.data[i] += h;
    minus.data[i] -= h;
    const double fd = (LdmLoss(*bb, plus, prompt, draw, {}).value -
                       LdmLoss(*bb, minus, prompt, draw, {}).value) /
                      (2 * h);
    EXPECT_LT(RelativeError(fd, r.z0_grad.data[i]), 1e-3) << "coord " << i;
  }
}

TEST(DreamBoothLossTest, LambdaZeroEqualsInstanceTerm) {
  auto bb = MakeBackbone("toy");
  Rng rng(5);
  const ImageTensor img = InteriorImage(rng, 64, 64, 3);
  const auto ip = bb->EmbedPrompt("a painting in sks style");
  const auto pp = bb->EmbedPrompt("a painting");
  const NoiseDraw d = SampleNoiseDraw(*bb, rng);
  const NoiseDraw pd = SampleNoiseDraw(*bb, rng);
  const auto db = DreamBoothLoss(*bb, img, nullptr, ip, pp, 0.0, d, pd, {});
  const double ldm = LdmLoss(*bb, bb->Encode(img), ip, d, {}).value;
  EXPECT_EQ(db.total, ldm);
  EXPECT_EQ(db.instance_term, ldm);
}

TEST(DreamBoothLossTest, BothTermsZeroGiveZero) {
  RiggedBackbone bb;
  Rng rng(6);
  const ImageTensor img = InteriorImage(rng, 64, 64, 3);
  const auto ip = bb.EmbedPrompt("a painting in sks style");
  const auto pp = bb.EmbedPrompt("a painting");
  const NoiseDraw d = SampleNoiseDraw(bb, rng);
  NoiseDraw pd = d;  // same eps so one forced output zeroes both terms
  bb.forced = d.eps;
  const auto db = DreamBoothLoss(bb, img, &img, ip, pp, 1.0, d, pd, {});
  EXPECT_EQ(db.total, 0.0);
}

TEST(DreamBoothLossTest, RiggedConstantsCombineAsAPlusTwoB) {
  RiggedBackbone bb;
  Rng rng(7);
  const ImageTensor img = InteriorImage(rng, 64, 64, 3);
  const ImageTensor cls = InteriorImage(rng, 64, 64, 3);
  const auto ip = bb.EmbedPrompt("a painting in sks style");
  const auto pp = bb.EmbedPrompt("a painting");
  const NoiseDraw d = SampleNoiseDraw(bb, rng);
  const NoiseDraw pd = SampleNoiseDraw(bb, rng);
  const double c = 0.3;
  bb.forced = Filled(bb.latent_geometry(), c);
  const double a = MeanSquaredGap(d.eps, c);
  const double b = MeanSquaredGap(pd.eps, c);
  const auto db = DreamBoothLoss(bb, img, &cls, ip, pp, 2.0, d, pd, {});
  EXPECT_NEAR(db.instance_term, a, 1e-12);
  EXPECT_NEAR(db.prior_term, b, 1e-12);
  EXPECT_NEAR(db.total, a + 2.0 * b, 1e-12);
}

TEST(DreamBoothLossTest, MissingClassExampleThrows) {
  auto bb = MakeBackbone("toy");
  Rng rng(8);
  const ImageTensor img = InteriorImage(rng, 64, 64, 3);
  const auto ip = bb->EmbedPrompt("a painting in sks style");
  const NoiseDraw d = SampleNoiseDraw(*bb, rng);
  EXPECT_THROW(DreamBoothLoss(*bb, img, nullptr, ip, ip, 1.0, d, d, {}),
               ConfigError);
}

TEST(DreamBoothLossTest, PixelGradientMatchesFiniteDifferences) {
  auto bb = MakeBackbone("toy-paper");
  bb->SetTrainable(ResolvePreset(LayerPreset::kPaperTop4, bb->layer_ids()));
  Rng rng(9);
  const ImageTensor img = InteriorImage(rng, 64, 64, 3);
  const ImageTensor cls = InteriorImage(rng, 64, 64, 3);
  const auto ip = bb->EmbedPrompt("a painting in sks style");
  const auto pp = bb->EmbedPrompt("a painting");
  const NoiseDraw d = SampleNoiseDraw(*bb, rng);
  const NoiseDraw pd = SampleNoiseDraw(*bb, rng);
  const auto r =
      DreamBoothLoss(*bb, img, &cls, ip, pp, 1.0, d, pd, {.input = true});
  const double h = 1e-4;
  for (int k = 0; k < 5; ++k) {
    const int i = rng.UniformInt(static_cast<int>(img.size()));
    ImageTensor plus = img, minus = img;
    plus.data[i] += h;
    minus.data[i] -= h;
    const double fd =
        (DreamBoothLoss(*bb, plus, &cls, ip, pp, 1.0, d, pd, {}).total -
         DreamBoothLoss(*bb, minus, &cls, ip, pp, 1.0, d, pd, {}).total) /
        (2 * h);
    EXPECT_LT(RelativeError(fd, r.instance_grad.data[i]), 1e-3)
        << "pixel " << i << " fd " << fd << " analytic "
        << r.instance_grad.data[i];
  }
}

TEST(PgdStepTest, SignStepFromZero) {
  const ImageTensor clean = ImageTensor::Filled(4, 4, 3, 0.5);
  Perturbation p{ImageTensor::Filled(4, 4, 3, 0.0), 0.1};
  const ImageTensor grad = ImageTensor::Filled(4, 4, 3, 3.7);
  EXPECT_TRUE(PgdAscentStep(p, grad, 0.01, clean).applied);
  for (double v : p.delta.data) EXPECT_DOUBLE_EQ(v, 0.01);
}

TEST(PgdStepTest, ProjectionBindsAtBudget) {
  const ImageTensor clean = ImageTensor::Filled(4, 4, 3, 0.5);
  Perturbation p{ImageTensor::Filled(4, 4, 3, 0.1), 0.1};
  const ImageTensor grad = ImageTensor::Filled(4, 4, 3, 1.0);
  PgdAscentStep(p, grad, 0.01, clean);
  for (double v : p.delta.data) EXPECT_DOUBLE_EQ(v, 0.1);
}

TEST(PgdStepTest, ValidRangeClampMatchesElementwiseOracle) {
  Rng rng(10);
  ImageTensor clean = testing::RandomImage(rng, 8, 8, 3);
  clean.data[0] = 1.0;
  clean.data[1] = 0.0;
  Perturbation p{ImageTensor::Filled(8, 8, 3, 0.0), 0.05};
  ImageTensor grad = ImageTensor::Filled(8, 8, 3, 0.0);
  for (double& g : grad.data) g = rng.Normal();
  grad.data[0] = 1.0;
  grad.data[1] = -1.0;
  const Perturbation before = p;
  PgdAscentStep(p, grad, 0.02, clean);
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const double s = grad.data[i] > 0 ? 1.0 : (grad.data[i] < 0 ? -1.0 : 0.0);
    double d = std::clamp(before.delta.data[i] + 0.02 * s, -0.05, 0.05);
    if (clean.data[i] + d > 1.0) d = 1.0 - clean.data[i];
    if (clean.data[i] + d < 0.0) d = -clean.data[i];
    EXPECT_DOUBLE_EQ(p.delta.data[i], d);
  }
  EXPECT_LE(p.delta.data[0], 0.0);
  EXPECT_LE(clean.data[0] + p.delta.data[0], 1.0);
  EXPECT_TRUE(SatisfiesBudget(p, clean));
}

TEST(PgdStepTest, NonFiniteGradientSkipsStep) {
  const ImageTensor clean = ImageTensor::Filled(2, 2, 3, 0.5);
  Perturbation p{ImageTensor::Filled(2, 2, 3, 0.0), 0.1};
  ImageTensor grad = ImageTensor::Filled(2, 2, 3, 1.0);
  grad.data[3] = std::numeric_limits<double>::quiet_NaN();
  const auto outcome = PgdAscentStep(p, grad, 0.01, clean);
  EXPECT_FALSE(outcome.applied);
  EXPECT_FALSE(outcome.note.empty());
  for (double v : p.delta.data) EXPECT_EQ(v, 0.0);
}

class ProtectTest : public ::testing::Test {
 protected:
  void SetUp() override {
    backbone_ = MakeBackbone("toy");
    Rng rng(11);
    for (int i = 0; i < 3; ++i) images_.push_back(InteriorImage(rng, 64, 64, 3));
    class_examples_ = {InteriorImage(rng, 64, 64, 3)};
    config_.selected_layers = {backbone_->layer_ids()[1]};
    config_.outer_iters = 3;
    config_.eval_draws = 2;
  }

  std::unique_ptr<Backbone> backbone_;
  std::vector<ImageTensor> images_;
  std::vector<ImageTensor> class_examples_;
  ProtectConfig config_;
};

TEST_F(ProtectTest, ZeroOuterItersIsIdentity) {
  config_.outer_iters = 0;
  const auto r = Protect(images_, *backbone_, config_, class_examples_);
  ASSERT_EQ(r.images.size(), images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i) {
    EXPECT_EQ(r.images[i].data, images_[i].data);
  }
  EXPECT_TRUE(r.log.empty());
}

TEST_F(ProtectTest, BudgetContractAcrossSweep) {
  for (double budget : {0.05, 0.08, 0.1, 0.13}) {
    config_.budget = budget;
    config_.step_size = budget / 10.0;
    config_.outer_iters = 4;
    const auto r = Protect(images_, *backbone_, config_, class_examples_);
    ASSERT_EQ(r.log.size(), 4u);
    for (std::size_t i = 0; i < images_.size(); ++i) {
      EXPECT_LE(MaxAbsDifference(r.images[i], images_[i]), budget + 1e-6);
      for (double v : r.images[i].data) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
      const ImageTensor q =
          QuantizeWithinBudget(r.images[i], images_[i], budget);
      EXPECT_LE(MaxAbsDifference(q, images_[i]), budget + 1e-12);
    }
  }
}

TEST_F(ProtectTest, EmptyInputsThrow) {
  EXPECT_THROW(Protect({}, *backbone_, config_, class_examples_), ConfigError);
  config_.selected_layers.clear();
  EXPECT_THROW(Protect(images_, *backbone_, config_, class_examples_),
               ConfigError);
}

TEST_F(ProtectTest, ZeroBudgetReturnsCleanWithWarning) {
  config_.budget = 0.0;
  const auto r = Protect(images_, *backbone_, config_, class_examples_);
  ASSERT_FALSE(r.warnings.empty());
  for (std::size_t i = 0; i < images_.size(); ++i) {
    EXPECT_EQ(r.images[i].data, images_[i].data);
  }
}

TEST_F(ProtectTest, BadConfigRejected) {
  config_.step_size = 0.5;
  EXPECT_THROW(config_.Validate(), ConfigError);
  config_.step_size = 0.01;
  config_.lambda = -1.0;
  EXPECT_THROW(config_.Validate(), ConfigError);
}

TEST_F(ProtectTest, DeterministicBitForBit) {
  const auto a = Protect(images_, *backbone_, config_, class_examples_);
  const auto b = Protect(images_, *backbone_, config_, class_examples_);
  for (std::size_t i = 0; i < images_.size(); ++i) {
    EXPECT_EQ(ContentHash(a.images[i]), ContentHash(b.images[i]));
  }
}

TEST_F(ProtectTest, ModelIsRestoredAndIsolated) {
  backbone_->SetTrainable({});
  const auto& params = backbone_->params();
  const std::uint64_t before = params.Hash();
  std::vector<std::uint64_t> owners_before;
  for (int l = -2; l < 3; ++l) owners_before.push_back(params.HashOwner(l));
  const auto r = Protect(images_, *backbone_, config_, class_examples_);
  EXPECT_FALSE(r.log.empty());
  EXPECT_EQ(params.Hash(), before);
  for (int l = -2; l < 3; ++l) {
    EXPECT_EQ(params.HashOwner(l), owners_before[l + 2]) << "owner " << l;
  }
  EXPECT_TRUE(backbone_->trainable_layers().empty());
}

TEST_F(ProtectTest, LogFieldsPopulated) {
  const auto r = Protect(images_, *backbone_, config_, class_examples_);
  ASSERT_EQ(r.log.size(), 3u);
  for (const auto& e : r.log) {
    EXPECT_TRUE(std::isfinite(e.finetune_loss));
    EXPECT_TRUE(std::isfinite(e.adversarial_loss));
    EXPECT_LE(e.linf, config_.budget + 1e-12);
    EXPECT_GE(e.wall_seconds, 0.0);
  }
}

TEST(ProtectTrendTest, AdversarialLossRisesOverFiftyIterations) {
  auto bb = MakeBackbone("toy");
  Rng rng(12);
  std::vector<ImageTensor> images;
  for (int i = 0; i < 3; ++i) images.push_back(InteriorImage(rng, 64, 64, 3));
  const auto cls = GenerateClassExamples(*bb, "a painting", 2, 1);
  for (std::uint64_t seed : {1, 2, 3}) {
    ProtectConfig cfg;
    cfg.seed = seed;
    cfg.outer_iters = 50;
    cfg.inner_finetune_steps = 1;
    cfg.eval_draws = 2;
    cfg.selected_layers = bb->layer_ids();
    const auto r = Protect(images, *bb, cfg, cls);
    EXPECT_GE(r.log.back().adversarial_loss, r.initial_adversarial_loss)
        << "seed " << seed;
  }
}

TEST(ClassExamplesTest, CountShapeAndDeterminism) {
  auto bb = MakeBackbone("toy");
  EXPECT_TRUE(GenerateClassExamples(*bb, "a painting", 0, 1).empty());
  const auto a = GenerateClassExamples(*bb, "a painting", 4, 1);
  const auto b = GenerateClassExamples(*bb, "a painting", 4, 1);
  ASSERT_EQ(a.size(), 4u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].height, 64);
    EXPECT_EQ(a[i].width, 64);
    EXPECT_EQ(a[i].channels, 3);
    EXPECT_EQ(ContentHash(a[i]), ContentHash(b[i]));
  }
  EXPECT_NE(ContentHash(a[0]), ContentHash(a[1]));
}

TEST(ClassExamplesTest, DiskCacheRoundTrips) {
  auto bb = MakeBackbone("toy");
  const auto dir = std::filesystem::temp_directory_path() / "artshield_cls_test";
  std::filesystem::remove_all(dir);
  const auto fresh = GenerateClassExamples(*bb, "a painting", 2, 5, {}, dir);
  const auto cached = GenerateClassExamples(*bb, "a painting", 2, 5, {}, dir);
  for (std::size_t i = 0; i < fresh.size(); ++i) {
    EXPECT_EQ(ContentHash(fresh[i]), ContentHash(cached[i]));
  }
  std::filesystem::remove_all(dir);
}

TEST(QuantizeWithinBudgetTest, StaysOnGridAndInsideBudget) {
  Rng rng(13);
  const ImageTensor clean = testing::RandomImage(rng, 8, 8, 3);
  ImageTensor prot = clean;
  for (double& v : prot.data) v = std::clamp(v + 0.02 * rng.Normal(), 0.0, 1.0);
  for (double budget : {0.001, 0.01, 0.05}) {
    ImageTensor bounded = prot;
    for (std::size_t i = 0; i < bounded.size(); ++i) {
      bounded.data[i] = std::clamp(bounded.data[i], clean.data[i] - budget,
                                   clean.data[i] + budget);
    }
    const ImageTensor q = QuantizeWithinBudget(bounded, clean, budget);
    for (std::size_t i = 0; i < q.size(); ++i) {
      EXPECT_LE(std::abs(q.data[i] - clean.data[i]), budget);
      const double level = q.data[i] * 255.0;
      const bool on_grid = std::abs(level - std::round(level)) < 1e-9;
      EXPECT_TRUE(on_grid || q.data[i] == clean.data[i]);
    }
  }
}

}  // namespace
}  // namespace artshield
