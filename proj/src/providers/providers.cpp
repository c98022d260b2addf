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

#include "artshield/providers/providers.hpp"

#include <cmath>

#include "artshield/core/errors.hpp"
#include "artshield/core/rng.hpp"

namespace artshield {
namespace {

RowMatrix RandomMatrix(std::uint64_t seed, int rows, int cols) {
  Rng rng(seed);
  RowMatrix m(rows, cols);
  const double scale = 1.0 / std::sqrt(static_cast<double>(cols));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = rng.Normal() * scale;
  }
  return m;
}

ImageTensor AsRgb(const ImageTensor& image, int size) {
  if (image.channels != 3 && image.channels != 1) {
    throw DimensionError("providers expect 1 or 3 channels, got " +
                         image.ShapeString());
  }
  ImageTensor resized = ResizeBilinear(image, size, size);
  if (resized.channels == 3) return resized;
  ImageTensor rgb = ImageTensor::Filled(size, size, 3, 0.0);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      for (int c = 0; c < 3; ++c) rgb.at(y, x, c) = resized.at(y, x, 0);
    }
  }
  return rgb;
}

Eigen::VectorXd Flatten(const ImageTensor& image, double offset) {
  Eigen::VectorXd v(image.size());
  for (std::size_t i = 0; i < image.size(); ++i) v[i] = image.data[i] - offset;
  return v;
}

}  // namespace

StubStyleProvider::StubStyleProvider(std::uint64_t seed)
    : filters_(kFilters * 27),
      projection_(RandomMatrix(DeriveSeed(seed, "projection"),
                               kStyleDescriptorDim, kFilters * kFilters + 6)) {
  Rng rng(DeriveSeed(seed, "filters"));
  for (int f = 0; f < kFilters; ++f) {
    double mean = 0.0;
    for (int k = 0; k < 27; ++k) {
      filters_[f * 27 + k] = rng.Normal();
      mean += filters_[f * 27 + k] / 27.0;
    }
    // Zero-mean filters respond to texture rather than brightness.
    for (int k = 0; k < 27; ++k) filters_[f * 27 + k] -= mean;
  }
}

std::vector<double> StubStyleProvider::Describe(const ImageTensor& image) const {
  const ImageTensor rgb = AsRgb(image, kSize);
  const int n = kSize - 2;
  RowMatrix responses(kFilters, n * n);
  for (int f = 0; f < kFilters; ++f) {
    const double* w = &filters_[f * 27];
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        double acc = 0.0;
        for (int dy = 0; dy < 3; ++dy) {
          for (int dx = 0; dx < 3; ++dx) {
            for (int c = 0; c < 3; ++c) {
              acc += w[(dy * 3 + dx) * 3 + c] * rgb.at(y + dy, x + dx, c);
            }
          }
        }
        responses(f, y * n + x) = acc;
      }
    }
  }
  const RowMatrix gram = responses * responses.transpose() / (n * n);
  Eigen::VectorXd features(kFilters * kFilters + 6);
  for (int i = 0; i < kFilters * kFilters; ++i) {
    features[i] = gram(i / kFilters, i % kFilters);
  }
  for (int c = 0; c < 3; ++c) {
    double mean = 0.0, sq = 0.0;
    const int count = kSize * kSize;
    for (int p = 0; p < count; ++p) mean += rgb.data[p * 3 + c];
    mean /= count;
    for (int p = 0; p < count; ++p) {
      const double d = rgb.data[p * 3 + c] - mean;
      sq += d * d;
    }
    features[kFilters * kFilters + c] = mean - 0.5;
    features[kFilters * kFilters + 3 + c] = std::sqrt(sq / count);
  }
  const Eigen::VectorXd out = projection_ * features;
  return {out.data(), out.data() + out.size()};
}

StubPerceptualProvider::StubPerceptualProvider(std::uint64_t seed)
    : projection_(RandomMatrix(seed, kDim, kSize * kSize * 3)) {}

double StubPerceptualProvider::Distance(const ImageTensor& a,
                                        const ImageTensor& b) const {
  CheckSameShape(a, b, "perceptual distance");
  const Eigen::VectorXd pa = projection_ * Flatten(AsRgb(a, kSize), 0.5);
  const Eigen::VectorXd pb = projection_ * Flatten(AsRgb(b, kSize), 0.5);
  return (pa - pb).squaredNorm() / kDim;
}

StubFeatureProvider::StubFeatureProvider(std::uint64_t seed, int dim)
    : projection_(RandomMatrix(seed, dim, kSize * kSize * 3)) {
  if (dim < 1) throw RangeError("feature dim must be >= 1");
}

std::vector<double> StubFeatureProvider::Embed(const ImageTensor& image) const {
  const Eigen::VectorXd out = projection_ * Flatten(AsRgb(image, kSize), 0.5);
  return {out.data(), out.data() + out.size()};
}

ProviderSet StubProviders() {
  return {std::make_shared<StubStyleProvider>(),
          std::make_shared<StubPerceptualProvider>(),
          std::make_shared<StubFeatureProvider>()};
}

}  // namespace artshield
