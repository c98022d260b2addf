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

#ifndef ARTSHIELD_EVAL_METRICS_HPP_
#define ARTSHIELD_EVAL_METRICS_HPP_

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "artshield/core/image.hpp"
#include "artshield/providers/providers.hpp"

namespace artshield {

inline constexpr double kPsnrCap = 100.0;

// Peak 1.0; identical images give kPsnrCap.
double Psnr(const ImageTensor& a, const ImageTensor& b);

struct SsimOptions {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
};

// Mean local SSIM over valid Gaussian windows, averaged over channels.
double Ssim(const ImageTensor& a, const ImageTensor& b,
            const SsimOptions& options = {});

// Normalized 1-D Gaussian taps of odd length `size`.
std::vector<double> GaussianTaps(int size, double sigma);
// Outer product of GaussianTaps, row-major.
std::vector<double> GaussianKernel2D(int size, double sigma);

double Lpips(const ImageTensor& a, const ImageTensor& b,
             const PerceptualDistanceProvider& provider);

// Mean cosine over all (generated, original) pairs.
double CsdCosine(std::span<const ImageTensor> generated,
                 std::span<const ImageTensor> originals,
                 const StyleDescriptorProvider& provider);

struct GaussianMoments {
  Eigen::VectorXd mean;
  // Unbiased (n - 1) covariance.
  Eigen::MatrixXd covariance;
};

// Rows are samples. Needs at least 2 rows.
GaussianMoments FitGaussian(const Eigen::MatrixXd& samples);

struct FrechetResult {
  double distance = 0.0;
  // Ridge added to both covariances; 0 when none was needed.
  double shrinkage = 0.0;
};

// |mu1 - mu2|^2 + Tr(S1 + S2 - 2 (S1 S2)^(1/2)), clamped at 0.
FrechetResult FrechetDistance(const GaussianMoments& a,
                              const GaussianMoments& b);

struct ArtFidResult {
  double value = 0.0;
  double fid = 0.0;
  // Mean over generated images of the smallest distance to any original.
  double lpips_factor = 0.0;
  double shrinkage = 0.0;
};

// (1 + FID) * (1 + lpips_factor). Needs at least 2 images per side.
ArtFidResult ArtFid(std::span<const ImageTensor> generated,
                    std::span<const ImageTensor> originals,
                    const FeatureProvider& features,
                    const PerceptualDistanceProvider& perceptual);

ImageTensor JpegTransform(const ImageTensor& image, int quality = 75);

// Reflect-padded Gaussian blur; throws RangeError for an even kernel size.
ImageTensor GaussianBlur(const ImageTensor& image, int kernel = 3,
                         double sigma = 0.05);

}  // namespace artshield

#endif  // ARTSHIELD_EVAL_METRICS_HPP_
