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

#ifndef ARTSHIELD_KERNELS_KERNELS_HPP_
#define ARTSHIELD_KERNELS_KERNELS_HPP_

// OpenMP data-parallel kernels behind the metric, transform and attention
// code. Every kernel has a serial twin in reference.hpp with the same
// signature; tests check that the two agree and bench/ times them.
//
// Reductions are computed as fixed-size block partials that are summed in
// block order, so results do not depend on the thread count.

#include <span>
#include <vector>

namespace artshield::kernels {

// Single-channel plane, row-major.
struct Plane {
  int height = 0;
  int width = 0;
  std::vector<double> data;

  double at(int y, int x) const { return data[y * width + x]; }
};

// Σ (a_i - b_i)^2.
double SquaredErrorSum(std::span<const double> a, std::span<const double> b);

// Separable correlation with `taps` along both axes, no padding. Output is
// (h - k + 1) x (w - k + 1).
Plane FilterValid(const Plane& in, std::span<const double> taps);

// Dense k x k correlation with reflect-101 borders (d c b | a b c d | c b a).
// Output has the input's shape.
Plane Convolve2DReflect(const Plane& in, std::span<const double> kernel,
                        int ksize);

// Row-wise softmax of a rows x cols matrix stored row-major, in place.
void SoftmaxRows(std::span<double> m, int rows, int cols);

// Mean of attention[h, q, tok] over all heads, queries and tok in `span`.
// Layout is [heads][queries][tokens].
double SpanMean(std::span<const double> attention, int heads, int queries,
                int tokens, std::span<const int> span);

// Index into [0, n) after reflect-101 folding.
int ReflectIndex(int i, int n);

}  // namespace artshield::kernels

#endif  // ARTSHIELD_KERNELS_KERNELS_HPP_
