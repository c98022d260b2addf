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

#ifndef ARTSHIELD_PROVIDERS_PROVIDERS_HPP_
#define ARTSHIELD_PROVIDERS_PROVIDERS_HPP_

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "artshield/backend/types.hpp"
#include "artshield/core/image.hpp"

namespace artshield {

inline constexpr int kStyleDescriptorDim = 768;

// Maps an image to a style embedding. Implementations throw ProviderError
// when the underlying model is unavailable.
class StyleDescriptorProvider {
 public:
  virtual ~StyleDescriptorProvider() = default;
  virtual std::string name() const = 0;
  virtual std::vector<double> Describe(const ImageTensor& image) const = 0;
};

// Perceptual distance between two images of equal shape.
class PerceptualDistanceProvider {
 public:
  virtual ~PerceptualDistanceProvider() = default;
  virtual std::string name() const = 0;
  virtual double Distance(const ImageTensor& a, const ImageTensor& b) const = 0;
};

// Deep feature embedding used by the Frechet distance.
class FeatureProvider {
 public:
  virtual ~FeatureProvider() = default;
  virtual std::string name() const = 0;
  virtual int dim() const = 0;
  virtual std::vector<double> Embed(const ImageTensor& image) const = 0;
};

// Gram statistics of fixed random filters, randomly projected to 768.
class StubStyleProvider : public StyleDescriptorProvider {
 public:
  explicit StubStyleProvider(std::uint64_t seed = 0x5717e);
  std::string name() const override { return "stub-style"; }
  std::vector<double> Describe(const ImageTensor& image) const override;

 private:
  static constexpr int kFilters = 8;
  static constexpr int kSize = 32;
  std::vector<double> filters_;  // [kFilters][3][3][3]
  RowMatrix projection_;         // [768, kFilters^2 + 6]
};

// Squared distance between random projections of 16x16 centered images.
class StubPerceptualProvider : public PerceptualDistanceProvider {
 public:
  explicit StubPerceptualProvider(std::uint64_t seed = 0x1e915);
  std::string name() const override { return "stub-lpips"; }
  double Distance(const ImageTensor& a, const ImageTensor& b) const override;

  static constexpr int kSize = 16;
  static constexpr int kDim = 64;
  // Applied to the 16x16 resize, centered at 0.5.
  const RowMatrix& projection() const { return projection_; }

 private:
  RowMatrix projection_;  // [kDim, kSize * kSize * 3]
};

// Random projection of the 8x8 resized image.
class StubFeatureProvider : public FeatureProvider {
 public:
  explicit StubFeatureProvider(std::uint64_t seed = 0xf1d, int dim = 32);
  std::string name() const override { return "stub-inception"; }
  int dim() const override { return static_cast<int>(projection_.rows()); }
  std::vector<double> Embed(const ImageTensor& image) const override;

 private:
  static constexpr int kSize = 8;
  RowMatrix projection_;
};

struct ProviderSet {
  std::shared_ptr<const StyleDescriptorProvider> style;
  std::shared_ptr<const PerceptualDistanceProvider> perceptual;
  std::shared_ptr<const FeatureProvider> features;
};

ProviderSet StubProviders();

}  // namespace artshield

#endif  // ARTSHIELD_PROVIDERS_PROVIDERS_HPP_
