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

#ifndef ARTSHIELD_CORE_IMAGE_HPP_
#define ARTSHIELD_CORE_IMAGE_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace artshield {

enum class Provenance { kClean, kProtected, kGenerated };

std::string_view ProvenanceName(Provenance p);

// Interleaved H x W x C image with values on [0, 1].
struct ImageTensor {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> data;
  Provenance provenance = Provenance::kClean;
  // Free-form origin note: source path, generating prompt, ...
  std::string tag;

  static ImageTensor Filled(int height, int width, int channels, double value,
                            Provenance provenance = Provenance::kClean);

  std::size_t size() const { return data.size(); }
  std::size_t Index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * width + x) * channels + c;
  }
  double& at(int y, int x, int c) { return data[Index(y, x, c)]; }
  double at(int y, int x, int c) const { return data[Index(y, x, c)]; }

  bool SameShape(const ImageTensor& other) const {
    return height == other.height && width == other.width &&
           channels == other.channels;
  }
  std::string ShapeString() const;
};

// Throws DimensionError unless the shapes agree.
void CheckSameShape(const ImageTensor& a, const ImageTensor& b,
                    std::string_view what);

// Hash over shape and pixel bytes; provenance and tag are not included.
std::uint64_t ContentHash(const ImageTensor& image);

double MaxAbsDifference(const ImageTensor& a, const ImageTensor& b);

// Rounds every pixel to the nearest multiple of 1/255.
ImageTensor QuantizeTo8Bit(const ImageTensor& image);

// Bilinear resampling with half-pixel centres.
ImageTensor ResizeBilinear(const ImageTensor& image, int height, int width);

}  // namespace artshield

#endif  // ARTSHIELD_CORE_IMAGE_HPP_
