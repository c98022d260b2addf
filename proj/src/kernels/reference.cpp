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

#include "artshield/kernels/reference.hpp"

#include <cmath>

#include "artshield/core/errors.hpp"

namespace artshield::kernels::reference {

double SquaredErrorSum(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("SquaredErrorSum: length mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += (a[i] - b[i]) * (a[i] - b[i]);
  }
  return s;
}

Plane FilterValid(const Plane& in, std::span<const double> taps) {
  const int k = static_cast<int>(taps.size());
  if (in.height < k || in.width < k) {
    throw DimensionError("FilterValid: plane smaller than filter");
  }
  Plane out{in.height - k + 1, in.width - k + 1, {}};
  out.data.resize(static_cast<std::size_t>(out.height) * out.width);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      double s = 0.0;
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
          s += taps[i] * taps[j] * in.at(y + i, x + j);
        }
      }
      out.data[y * out.width + x] = s;
    }
  }
  return out;
}

Plane Convolve2DReflect(const Plane& in, std::span<const double> kernel,
                        int ksize) {
  if (ksize <= 0 || ksize % 2 == 0) {
    throw RangeError("Convolve2DReflect: kernel size must be odd");
  }
  if (static_cast<int>(kernel.size()) != ksize * ksize) {
    throw DimensionError("Convolve2DReflect: kernel has wrong length");
  }
  const int r = ksize / 2;
  Plane out{in.height, in.width, std::vector<double>(in.data.size())};
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      double s = 0.0;
      for (int i = -r; i <= r; ++i) {
        for (int j = -r; j <= r; ++j) {
          s += kernel[(i + r) * ksize + (j + r)] *
               in.at(ReflectIndex(y + i, in.height),
                     ReflectIndex(x + j, in.width));
        }
      }
      out.data[y * in.width + x] = s;
    }
  }
  return out;
}

void SoftmaxRows(std::span<double> m, int rows, int cols) {
  if (static_cast<std::size_t>(rows) * cols != m.size()) {
    throw DimensionError("SoftmaxRows: size mismatch");
  }
  for (int r = 0; r < rows; ++r) {
    double mx = m[r * cols];
    for (int c = 1; c < cols; ++c) mx = std::max(mx, m[r * cols + c]);
    double z = 0.0;
    for (int c = 0; c < cols; ++c) z += std::exp(m[r * cols + c] - mx);
    for (int c = 0; c < cols; ++c) {
      m[r * cols + c] = std::exp(m[r * cols + c] - mx) / z;
    }
  }
}

double SpanMean(std::span<const double> attention, int heads, int queries,
                int tokens, std::span<const int> span) {
  if (span.empty()) throw RangeError("SpanMean: empty span");
  double s = 0.0;
  for (int h = 0; h < heads; ++h) {
    for (int q = 0; q < queries; ++q) {
      for (int tok : span) {
        s += attention[(static_cast<std::size_t>(h) * queries + q) * tokens +
                       tok];
      }
    }
  }
  return s / (static_cast<double>(heads) * queries * span.size());
}

}  // namespace artshield::kernels::reference
