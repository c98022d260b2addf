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

#include "artshield/kernels/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "artshield/core/errors.hpp"

namespace artshield::kernels {
namespace {

constexpr std::ptrdiff_t kBlock = 4096;
// Below this many elements a parallel region costs more than it saves.
constexpr std::ptrdiff_t kMinParallelWork = 1 << 16;

}  // namespace

int ReflectIndex(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

double SquaredErrorSum(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("SquaredErrorSum: length mismatch");
  }
  const auto n = static_cast<std::ptrdiff_t>(a.size());
  const std::ptrdiff_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
#pragma omp parallel for schedule(static) if (n >= kMinParallelWork)
  for (std::ptrdiff_t blk = 0; blk < blocks; ++blk) {
    const std::ptrdiff_t lo = blk * kBlock;
    const std::ptrdiff_t hi = std::min(n, lo + kBlock);
    double s = 0.0;
    for (std::ptrdiff_t i = lo; i < hi; ++i) {
      const double d = a[i] - b[i];
      s += d * d;
    }
    partial[blk] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

Plane FilterValid(const Plane& in, std::span<const double> taps) {
  const int k = static_cast<int>(taps.size());
  if (in.height < k || in.width < k) {
    throw DimensionError("FilterValid: plane smaller than filter");
  }
  const int oh = in.height - k + 1;
  const int ow = in.width - k + 1;
  // Horizontal pass over every input row, then vertical.
  Plane horiz{in.height, ow, std::vector<double>(in.height * ow)};
#pragma omp parallel for schedule(static) \
    if (static_cast<std::ptrdiff_t>(in.data.size()) * k >= kMinParallelWork)
  for (int y = 0; y < in.height; ++y) {
    const double* row = in.data.data() + y * in.width;
    double* out = horiz.data.data() + y * ow;
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int j = 0; j < k; ++j) s += taps[j] * row[x + j];
      out[x] = s;
    }
  }
  Plane out{oh, ow, std::vector<double>(oh * ow)};
#pragma omp parallel for schedule(static) \
    if (static_cast<std::ptrdiff_t>(in.data.size()) * k >= kMinParallelWork)
  for (int y = 0; y < oh; ++y) {
    double* dst = out.data.data() + y * ow;
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < k; ++i) s += taps[i] * horiz.data[(y + i) * ow + x];
      dst[x] = s;
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
#pragma omp parallel for schedule(static) \
    if (static_cast<std::ptrdiff_t>(kernel.size()) * in.data.size() >= \
        kMinParallelWork)
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      double s = 0.0;
      for (int i = 0; i < ksize; ++i) {
        const int yy = ReflectIndex(y + i - r, in.height);
        for (int j = 0; j < ksize; ++j) {
          const int xx = ReflectIndex(x + j - r, in.width);
          s += kernel[i * ksize + j] * in.data[yy * in.width + xx];
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
#pragma omp parallel for schedule(static) \
    if (static_cast<std::ptrdiff_t>(m.size()) >= kMinParallelWork)
  for (int r = 0; r < rows; ++r) {
    double* row = m.data() + static_cast<std::size_t>(r) * cols;
    const double mx = *std::max_element(row, row + cols);
    double z = 0.0;
    for (int c = 0; c < cols; ++c) {
      row[c] = std::exp(row[c] - mx);
      z += row[c];
    }
    const double inv = 1.0 / z;
    for (int c = 0; c < cols; ++c) row[c] *= inv;
  }
}

double SpanMean(std::span<const double> attention, int heads, int queries,
                int tokens, std::span<const int> span) {
  if (span.empty()) throw RangeError("SpanMean: empty span");
  const int rows = heads * queries;
  std::vector<double> partial(rows);
#pragma omp parallel for schedule(static) \
    if (static_cast<std::ptrdiff_t>(rows) * span.size() >= kMinParallelWork)
  for (int r = 0; r < rows; ++r) {
    const double* row = attention.data() + static_cast<std::size_t>(r) * tokens;
    double s = 0.0;
    for (int tok : span) s += row[tok];
    partial[r] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total / (static_cast<double>(rows) * span.size());
}

}  // namespace artshield::kernels
