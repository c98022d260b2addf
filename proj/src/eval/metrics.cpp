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

#include "artshield/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "artshield/core/errors.hpp"
#include "artshield/io/image_io.hpp"
#include "artshield/kernels/kernels.hpp"

namespace artshield {
namespace {

kernels::Plane Channel(const ImageTensor& image, int c) {
  kernels::Plane p{image.height, image.width,
                   std::vector<double>(static_cast<std::size_t>(image.height) *
                                       image.width)};
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      p.data[y * image.width + x] = image.at(y, x, c);
    }
  }
  return p;
}

kernels::Plane Multiply(const kernels::Plane& a, const kernels::Plane& b) {
  kernels::Plane out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= b.data[i];
  return out;
}

Eigen::MatrixXd EmbedAll(std::span<const ImageTensor> images,
                         const FeatureProvider& features) {
  Eigen::MatrixXd m(images.size(), features.dim());
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::vector<double> e = features.Embed(images[i]);
    if (static_cast<int>(e.size()) != features.dim()) {
      throw ProviderError(features.name() + " returned a wrong-sized embedding");
    }
    for (int j = 0; j < features.dim(); ++j) m(i, j) = e[j];
  }
  return m;
}

// Symmetric PSD square root via eigen-decomposition; negative eigenvalues
// from round-off are clamped to 0.
Eigen::MatrixXd SqrtPsd(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  const Eigen::VectorXd values = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * values.asDiagonal() *
         solver.eigenvectors().transpose();
}

}  // namespace

double Psnr(const ImageTensor& a, const ImageTensor& b) {
  CheckSameShape(a, b, "Psnr");
  if (a.size() == 0) throw DimensionError("Psnr: empty images");
  const double mse =
      kernels::SquaredErrorSum(a.data, b.data) / static_cast<double>(a.size());
  if (mse == 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

std::vector<double> GaussianTaps(int size, double sigma) {
  if (size < 1 || size % 2 == 0) {
    throw RangeError("Gaussian size must be odd and positive, got " +
                     std::to_string(size));
  }
  if (!(sigma > 0.0)) throw RangeError("Gaussian sigma must be > 0");
  std::vector<double> taps(size);
  const int r = size / 2;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - r;
    taps[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

std::vector<double> GaussianKernel2D(int size, double sigma) {
  const std::vector<double> taps = GaussianTaps(size, sigma);
  std::vector<double> kernel(static_cast<std::size_t>(size) * size);
  double sum = 0.0;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      kernel[y * size + x] = taps[y] * taps[x];
      sum += kernel[y * size + x];
    }
  }
  for (double& k : kernel) k /= sum;
  return kernel;
}

double Ssim(const ImageTensor& a, const ImageTensor& b,
            const SsimOptions& options) {
  CheckSameShape(a, b, "Ssim");
  if (a.height < options.window || a.width < options.window) {
    throw DimensionError("Ssim: image " + a.ShapeString() +
                         " is smaller than the " +
                         std::to_string(options.window) + "-pixel window");
  }
  const std::vector<double> taps = GaussianTaps(options.window, options.sigma);
  const double c1 = (options.k1 * 1.0) * (options.k1 * 1.0);
  const double c2 = (options.k2 * 1.0) * (options.k2 * 1.0);
  double total = 0.0;
  for (int c = 0; c < a.channels; ++c) {
    const kernels::Plane x = Channel(a, c);
    const kernels::Plane y = Channel(b, c);
    const kernels::Plane mx = kernels::FilterValid(x, taps);
    const kernels::Plane my = kernels::FilterValid(y, taps);
    const kernels::Plane mxx = kernels::FilterValid(Multiply(x, x), taps);
    const kernels::Plane myy = kernels::FilterValid(Multiply(y, y), taps);
    const kernels::Plane mxy = kernels::FilterValid(Multiply(x, y), taps);
    double sum = 0.0;
    for (std::size_t i = 0; i < mx.data.size(); ++i) {
      const double ux = mx.data[i], uy = my.data[i];
      const double vx = mxx.data[i] - ux * ux;
      const double vy = myy.data[i] - uy * uy;
      const double cov = mxy.data[i] - ux * uy;
      sum += ((2 * ux * uy + c1) * (2 * cov + c2)) /
             ((ux * ux + uy * uy + c1) * (vx + vy + c2));
    }
    total += sum / static_cast<double>(mx.data.size());
  }
  return total / a.channels;
}

double Lpips(const ImageTensor& a, const ImageTensor& b,
             const PerceptualDistanceProvider& provider) {
  CheckSameShape(a, b, "Lpips");
  return std::max(0.0, provider.Distance(a, b));
}

double CsdCosine(std::span<const ImageTensor> generated,
                 std::span<const ImageTensor> originals,
                 const StyleDescriptorProvider& provider) {
  if (generated.empty() || originals.empty()) {
    throw ConfigError("CsdCosine: both image sets must be nonempty");
  }
  auto describe = [&](std::span<const ImageTensor> images) {
    std::vector<Eigen::VectorXd> out;
    for (const auto& img : images) {
      const std::vector<double> d = provider.Describe(img);
      Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(d.data(), d.size());
      const double norm = v.norm();
      if (norm == 0.0) throw RangeError("CsdCosine: zero-norm style embedding");
      out.push_back(v / norm);
    }
    return out;
  };
  const auto g = describe(generated);
  const auto o = describe(originals);
  double sum = 0.0;
  for (const auto& gv : g) {
    for (const auto& ov : o) {
      if (gv.size() != ov.size()) throw DimensionError("embedding sizes differ");
      sum += std::clamp(gv.dot(ov), -1.0, 1.0);
    }
  }
  return sum / static_cast<double>(g.size() * o.size());
}

GaussianMoments FitGaussian(const Eigen::MatrixXd& samples) {
  if (samples.rows() < 2) {
    throw DimensionError("FitGaussian needs at least 2 samples");
  }
  GaussianMoments m;
  m.mean = samples.colwise().mean().transpose();
  const Eigen::MatrixXd centered = samples.rowwise() - m.mean.transpose();
  m.covariance =
      centered.transpose() * centered / static_cast<double>(samples.rows() - 1);
  return m;
}

FrechetResult FrechetDistance(const GaussianMoments& a,
                              const GaussianMoments& b) {
  if (a.mean.size() != b.mean.size()) {
    throw DimensionError("FrechetDistance: dimension mismatch");
  }
  FrechetResult result;
  Eigen::MatrixXd s1 = a.covariance;
  Eigen::MatrixXd s2 = b.covariance;
  auto singular = [](const Eigen::MatrixXd& s) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
    return solver.eigenvalues().minCoeff() <= 1e-12;
  };
  if (singular(s1) || singular(s2)) {
    result.shrinkage = 1e-6;
    s1 += result.shrinkage * Eigen::MatrixXd::Identity(s1.rows(), s1.cols());
    s2 += result.shrinkage * Eigen::MatrixXd::Identity(s2.rows(), s2.cols());
  }
  // Tr (S1 S2)^(1/2) = Tr (S1^(1/2) S2 S1^(1/2))^(1/2), which is symmetric.
  const Eigen::MatrixXd r1 = SqrtPsd(s1);
  const Eigen::MatrixXd inner = r1 * s2 * r1;
  const double cross = SqrtPsd(0.5 * (inner + inner.transpose())).trace();
  const double d = (a.mean - b.mean).squaredNorm() + s1.trace() + s2.trace() -
                   2.0 * cross;
  result.distance = std::max(0.0, d);
  return result;
}

ArtFidResult ArtFid(std::span<const ImageTensor> generated,
                    std::span<const ImageTensor> originals,
                    const FeatureProvider& features,
                    const PerceptualDistanceProvider& perceptual) {
  if (generated.size() < 2 || originals.size() < 2) {
    throw ConfigError("ArtFid needs at least 2 images per set");
  }
  ArtFidResult result;
  const FrechetResult fd = FrechetDistance(
      FitGaussian(EmbedAll(generated, features)),
      FitGaussian(EmbedAll(originals, features)));
  result.fid = fd.distance;
  result.shrinkage = fd.shrinkage;
  double factor = 0.0;
  for (const auto& g : generated) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& o : originals) best = std::min(best, Lpips(g, o, perceptual));
    factor += best;
  }
  result.lpips_factor = factor / static_cast<double>(generated.size());
  result.value = (1.0 + result.fid) * (1.0 + result.lpips_factor);
  return result;
}

ImageTensor JpegTransform(const ImageTensor& image, int quality) {
  ImageTensor out = DecodeJpeg(EncodeJpeg(image, quality));
  out.provenance = image.provenance;
  out.tag = image.tag;
  return out;
}

ImageTensor GaussianBlur(const ImageTensor& image, int kernel, double sigma) {
  const std::vector<double> weights = GaussianKernel2D(kernel, sigma);
  ImageTensor out = image;
  for (int c = 0; c < image.channels; ++c) {
    const kernels::Plane blurred =
        kernels::Convolve2DReflect(Channel(image, c), weights, kernel);
    for (int y = 0; y < image.height; ++y) {
      for (int x = 0; x < image.width; ++x) {
        out.at(y, x, c) = blurred.at(y, x);
      }
    }
  }
  return out;
}

}  // namespace artshield
