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

#include "artshield/core/errors.hpp"
#include "artshield/eval/metrics.hpp"
#include "artshield/eval/report.hpp"
#include "artshield/providers/providers.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace artshield {
namespace {

using testing::RandomImage;

TEST(PsnrTest, Examples) {
  Rng rng(51);
  const ImageTensor a = RandomImage(rng, 16, 16, 3);
  EXPECT_EQ(Psnr(a, a), 100.0);
  const ImageTensor base = ImageTensor::Filled(8, 8, 3, 0.5);
  ImageTensor shifted = base;
  for (double& v : shifted.data) v += 1.0 / 255.0;
  EXPECT_NEAR(Psnr(base, shifted), 48.1308036, 1e-6);
  const ImageTensor b = RandomImage(rng, 16, 16, 3);
  double mse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mse += (a.data[i] - b.data[i]) * (a.data[i] - b.data[i]);
  }
  mse /= a.size();
  EXPECT_NEAR(Psnr(a, b), 10.0 * std::log10(1.0 / mse), 1e-9);
  EXPECT_NEAR(Psnr(a, b), Psnr(b, a), 1e-9);
  EXPECT_THROW(Psnr(a, RandomImage(rng, 8, 8, 3)), DimensionError);
}

TEST(SsimTest, MatchesTextbookImplementation) {
  Rng rng(52);
  const ImageTensor a = RandomImage(rng, 16, 16, 3);
  ImageTensor b = a;
  for (double& v : b.data) v = std::clamp(v + 0.1 * rng.Normal(), 0.0, 1.0);
  double oracle = 0.0;
  for (int c = 0; c < 3; ++c) oracle += testing::TextbookSsim(a, b, c);
  oracle /= 3.0;
  EXPECT_NEAR(Ssim(a, b), oracle, 1e-4);
  EXPECT_NEAR(Ssim(a, b), Ssim(b, a), 1e-9);
  EXPECT_NEAR(Ssim(a, a), 1.0, 1e-12);
}

TEST(SsimTest, InvertedPatternScoresLow) {
  ImageTensor a = ImageTensor::Filled(32, 32, 1, 0.0);
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) a.at(y, x, 0) = ((x / 4 + y / 4) % 2) ? 1.0 : 0.0;
  }
  ImageTensor inv = a;
  for (double& v : inv.data) v = 1.0 - v;
  EXPECT_LT(Ssim(a, inv), 0.5);
}

TEST(SsimTest, TooSmallThrows) {
  Rng rng(53);
  const ImageTensor a = RandomImage(rng, 8, 8, 3);
  EXPECT_THROW(Ssim(a, a), DimensionError);
}

TEST(LpipsTest, StubClosedFormAndMonotone) {
  Rng rng(54);
  const StubPerceptualProvider stub;
  const ImageTensor a = RandomImage(rng, 16, 16, 3);
  const ImageTensor b = RandomImage(rng, 16, 16, 3);
  EXPECT_EQ(Lpips(a, a, stub), 0.0);
  // 16x16 input, so the stub resize is the identity.
  Eigen::VectorXd d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a.data[i] - b.data[i];
  const double oracle =
      (stub.projection() * d).squaredNorm() / StubPerceptualProvider::kDim;
  EXPECT_NEAR(Lpips(a, b, stub), oracle, 1e-12);
  ImageTensor noise = a;
  for (double& v : noise.data) v = rng.Normal();
  ImageTensor small = a, large = a;
  for (std::size_t i = 0; i < a.size(); ++i) {
    small.data[i] += 0.1 * noise.data[i];
    large.data[i] += 0.2 * noise.data[i];
  }
  EXPECT_LE(Lpips(a, small, stub), Lpips(a, large, stub));
}

class RiggedStyle : public StyleDescriptorProvider {
 public:
  std::string name() const override { return "rigged"; }
  // Descriptor is the first pixel's channels padded to the descriptor size.
  std::vector<double> Describe(const ImageTensor& image) const override {
    std::vector<double> v(kStyleDescriptorDim, 0.0);
    for (int c = 0; c < 3; ++c) v[c] = image.data[c];
    return v;
  }
};

ImageTensor PixelImage(double r, double g, double b) {
  ImageTensor img = ImageTensor::Filled(4, 4, 3, 0.0);
  img.data[0] = r;
  img.data[1] = g;
  img.data[2] = b;
  return img;
}

TEST(CsdCosineTest, Examples) {
  Rng rng(55);
  const StubStyleProvider stub;
  const std::vector<ImageTensor> set = {RandomImage(rng, 32, 32, 3),
                                        RandomImage(rng, 32, 32, 3)};
  const std::vector<ImageTensor> one = {set[0]};
  EXPECT_NEAR(CsdCosine(one, one, stub), 1.0, 1e-12);

  const RiggedStyle rigged;
  const std::vector<ImageTensor> x = {PixelImage(1, 0, 0)};
  const std::vector<ImageTensor> y = {PixelImage(0, 1, 0)};
  EXPECT_EQ(CsdCosine(x, y, rigged), 0.0);

  const std::vector<ImageTensor> g = {PixelImage(1, 0, 0), PixelImage(1, 1, 0)};
  const std::vector<ImageTensor> o = {PixelImage(1, 0, 0), PixelImage(0, 0, 1)};
  const double oracle = (1.0 + 0.0 + 1.0 / std::sqrt(2.0) + 0.0) / 4.0;
  EXPECT_NEAR(CsdCosine(g, o, rigged), oracle, 1e-12);
  const std::vector<ImageTensor> zero = {PixelImage(0, 0, 0)};
  EXPECT_THROW(CsdCosine(zero, x, rigged), RangeError);
}

TEST(FrechetTest, UnitGaussiansOneApart) {
  GaussianMoments a{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1)};
  GaussianMoments b{Eigen::VectorXd::Ones(1), Eigen::MatrixXd::Identity(1, 1)};
  EXPECT_NEAR(FrechetDistance(a, b).distance, 1.0, 1e-12);
  EXPECT_NEAR(FrechetDistance(a, a).distance, 0.0, 1e-12);
}

TEST(FrechetTest, FitGaussianUnbiased) {
  Eigen::MatrixXd s(3, 1);
  s << 1.0, 2.0, 3.0;
  const auto m = FitGaussian(s);
  EXPECT_DOUBLE_EQ(m.mean[0], 2.0);
  EXPECT_DOUBLE_EQ(m.covariance(0, 0), 1.0);
}

TEST(ArtFidTest, IdenticalPermutedAndBounded) {
  Rng rng(56);
  const StubFeatureProvider features;
  const StubPerceptualProvider perceptual;
  std::vector<ImageTensor> orig, gen;
  for (int i = 0; i < 4; ++i) orig.push_back(RandomImage(rng, 16, 16, 3));
  for (int i = 0; i < 4; ++i) gen.push_back(RandomImage(rng, 16, 16, 3));
  EXPECT_NEAR(ArtFid(orig, orig, features, perceptual).value, 1.0, 1e-6);
  const auto base = ArtFid(gen, orig, features, perceptual);
  std::vector<ImageTensor> shuffled = {gen[2], gen[0], gen[3], gen[1]};
  EXPECT_NEAR(ArtFid(shuffled, orig, features, perceptual).value, base.value,
              1e-9);
  EXPECT_GE(base.value, 1.0);
  EXPECT_NEAR(base.value, (1 + base.fid) * (1 + base.lpips_factor), 1e-12);
  const std::vector<ImageTensor> single = {gen[0]};
  EXPECT_THROW(ArtFid(single, orig, features, perceptual), ConfigError);
}

TEST(JpegTest, ShapeTrendFlatAndDeterminism) {
  Rng rng(57);
  const ImageTensor img = RandomImage(rng, 32, 32, 3);
  const ImageTensor j1 = JpegTransform(img);
  EXPECT_EQ(j1.ShapeString(), img.ShapeString());
  const ImageTensor j2 = JpegTransform(j1);
  auto mse = [](const ImageTensor& a, const ImageTensor& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      s += (a.data[i] - b.data[i]) * (a.data[i] - b.data[i]);
    }
    return s / a.size();
  };
  EXPECT_LT(mse(j1, j2), mse(img, j1));
  const ImageTensor flat = ImageTensor::Filled(16, 16, 3, 100.0 / 255.0);
  for (std::size_t i = 0; i < flat.size(); ++i) {
    EXPECT_LE(std::abs(JpegTransform(flat).data[i] - flat.data[i]),
              1.0 / 255.0 + 1e-12);
  }
  EXPECT_EQ(ContentHash(JpegTransform(img)), ContentHash(j1));
}

TEST(BlurTest, KernelAndOutputs) {
  const auto k = GaussianKernel2D(3, 0.05);
  double sum = 0.0;
  for (double w : k) sum += w;
  EXPECT_NEAR(sum, 1.0, 1e-10);
  EXPECT_NEAR(k[4], 1.0, 1e-12);
  const auto wide = GaussianKernel2D(5, 1.2);
  sum = 0.0;
  for (double w : wide) sum += w;
  EXPECT_NEAR(sum, 1.0, 1e-10);

  const ImageTensor flat = ImageTensor::Filled(8, 8, 3, 0.3);
  const ImageTensor blurred = GaussianBlur(flat, 5, 1.2);
  for (double v : blurred.data) EXPECT_NEAR(v, 0.3, 1e-12);

  Rng rng(58);
  const ImageTensor img = RandomImage(rng, 16, 16, 3);
  const ImageTensor near = GaussianBlur(img);
  for (std::size_t i = 0; i < img.size(); ++i) {
    EXPECT_NEAR(near.data[i], img.data[i], 1e-3);
  }

  ImageTensor impulse = ImageTensor::Filled(9, 9, 1, 0.0);
  impulse.at(4, 4, 0) = 1.0;
  const ImageTensor stamp = GaussianBlur(impulse, 5, 1.2);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      EXPECT_NEAR(stamp.at(2 + i, 2 + j, 0), wide[i * 5 + j], 1e-15);
    }
  }
  EXPECT_THROW(GaussianBlur(img, 4, 1.0), RangeError);
}

class EvaluateRunTest : public ::testing::Test {
 protected:
  void SetUp() override {
    Rng rng(59);
    for (int i = 0; i < 3; ++i) clean_.push_back(RandomImage(rng, 16, 16, 3));
    for (int i = 0; i < 3; ++i) gen_.push_back(RandomImage(rng, 16, 16, 3));
  }
  EvalInputs Inputs() const { return {clean_, clean_, gen_, gen_, clean_}; }
  std::vector<ImageTensor> clean_, gen_;
};

TEST_F(EvaluateRunTest, CleanEqualsProtectedGivesPerfectScores) {
  const auto [baseline, prot] =
      EvaluateRun(Inputs(), StubProviders(), TransformTag::kNone);
  EXPECT_EQ(baseline.method, "clean");
  EXPECT_EQ(prot.method, "StyleProtect");
  for (const auto* r : {&baseline, &prot}) {
    EXPECT_EQ(*r->psnr_db, 100.0);
    EXPECT_NEAR(*r->ssim, 1.0, 1e-12);
    EXPECT_EQ(*r->lpips, 0.0);
    ASSERT_TRUE(r->artfid.has_value());
    ASSERT_TRUE(r->csd_cos.has_value());
    EXPECT_TRUE(r->omitted.empty());
  }
}

TEST_F(EvaluateRunTest, MissingProvidersAreOmittedWithReason) {
  ProviderSet none;
  const auto [baseline, prot] = EvaluateRun(Inputs(), none, TransformTag::kNone);
  for (const auto& metric : ReportMetricNames()) {
    if (metric == "runtime_s_per_img") continue;
    EXPECT_TRUE(MetricValue(prot, metric).has_value() ||
                prot.omitted.count(metric))
        << metric;
  }
  EXPECT_FALSE(prot.lpips.has_value());
  EXPECT_FALSE(prot.omitted.at("lpips").empty());
  EXPECT_TRUE(prot.psnr_db.has_value());
}

TEST_F(EvaluateRunTest, TransformTagAndMisalignment) {
  const auto [baseline, prot] =
      EvaluateRun(Inputs(), StubProviders(), TransformTag::kJpeg75);
  EXPECT_EQ(prot.transform, TransformTag::kJpeg75);
  EXPECT_EQ(TransformTagName(prot.transform), "jpeg75");
  std::vector<ImageTensor> short_set = {clean_[0]};
  EvalInputs bad{clean_, short_set, gen_, gen_, clean_};
  EXPECT_THROW(EvaluateRun(bad, StubProviders(), TransformTag::kNone),
               DimensionError);
}

TEST_F(EvaluateRunTest, CsvRoundTripAndSchemaCheck) {
  auto [baseline, prot] =
      EvaluateRun(Inputs(), StubProviders(), TransformTag::kBlur3);
  baseline.artist = prot.artist = "artist_0";
  prot.csd_cos.reset();
  prot.omitted["csd_cos"] = "test";
  const std::vector<EvalReport> rows = {baseline, prot};
  const auto dir = std::filesystem::temp_directory_path() / "artshield_eval_test";
  std::filesystem::create_directories(dir);
  WriteReportCsv(rows, dir / "report.csv");
  const auto back = ReadReportCsv(dir / "report.csv");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].method, "StyleProtect");
  EXPECT_EQ(back[1].transform, TransformTag::kBlur3);
  EXPECT_FALSE(back[1].csd_cos.has_value());
  EXPECT_NEAR(*back[0].ssim, *baseline.ssim, 1e-9);
  std::ofstream(dir / "bad.csv") << "a,b,c\n";
  EXPECT_THROW(ReadReportCsv(dir / "bad.csv"), ConfigError);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace artshield
