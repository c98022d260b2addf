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

#include "artshield/core/image.hpp"

#include <algorithm>
#include <cmath>

#include "artshield/core/errors.hpp"
#include "artshield/core/hash.hpp"

namespace artshield {

std::string_view ProvenanceName(Provenance p) {
  switch (p) {
    case Provenance::kClean:
      return "clean";
    case Provenance::kProtected:
      return "protected";
    case Provenance::kGenerated:
      return "generated";
  }
  return "unknown";
}

ImageTensor ImageTensor::Filled(int height, int width, int channels,
                                double value, Provenance provenance) {
  if (height <= 0 || width <= 0 || channels <= 0) {
    throw DimensionError("image dimensions must be positive");
  }
  ImageTensor img;
  img.height = height;
  img.width = width;
  img.channels = channels;
  img.data.assign(static_cast<std::size_t>(height) * width * channels, value);
  img.provenance = provenance;
  return img;
}

std::string ImageTensor::ShapeString() const {
  return std::to_string(height) + "x" + std::to_string(width) + "x" +
         std::to_string(channels);
}

void CheckSameShape(const ImageTensor& a, const ImageTensor& b,
                    std::string_view what) {
  if (!a.SameShape(b)) {
    throw DimensionError(std::string(what) + ": shape mismatch " +
                         a.ShapeString() + " vs " + b.ShapeString());
  }
}

std::uint64_t ContentHash(const ImageTensor& image) {
  Fnv1a h;
  h.UpdateValue(image.height);
  h.UpdateValue(image.width);
  h.UpdateValue(image.channels);
  h.Update(std::span<const double>(image.data));
  return h.digest();
}

double MaxAbsDifference(const ImageTensor& a, const ImageTensor& b) {
  CheckSameShape(a, b, "MaxAbsDifference");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a.data[i] - b.data[i]));
  }
  return m;
}

ImageTensor QuantizeTo8Bit(const ImageTensor& image) {
  ImageTensor out = image;
  for (double& v : out.data) {
    v = std::round(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0;
  }
  return out;
}

ImageTensor ResizeBilinear(const ImageTensor& image, int height, int width) {
  if (height <= 0 || width <= 0) {
    throw DimensionError("resize target must be positive");
  }
  if (image.height == height && image.width == width) return image;
  ImageTensor out = ImageTensor::Filled(height, width, image.channels, 0.0,
                                        image.provenance);
  out.tag = image.tag;
  const double sy = static_cast<double>(image.height) / height;
  const double sx = static_cast<double>(image.width) / width;
  for (int y = 0; y < height; ++y) {
    const double fy =
        std::clamp((y + 0.5) * sy - 0.5, 0.0, image.height - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, image.height - 1);
    const double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx =
          std::clamp((x + 0.5) * sx - 0.5, 0.0, image.width - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, image.width - 1);
      const double wx = fx - x0;
      for (int c = 0; c < image.channels; ++c) {
        const double top =
            image.at(y0, x0, c) * (1 - wx) + image.at(y0, x1, c) * wx;
        const double bottom =
            image.at(y1, x0, c) * (1 - wx) + image.at(y1, x1, c) * wx;
        out.at(y, x, c) = top * (1 - wy) + bottom * wy;
      }
    }
  }
  return out;
}

}  // namespace artshield
