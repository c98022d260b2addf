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

#ifndef ARTSHIELD_KERNELS_REFERENCE_HPP_
#define ARTSHIELD_KERNELS_REFERENCE_HPP_

// Serial reference implementations of kernels.hpp. Straightforward loops,
// kept for testing and benchmarking only.

#include <span>

#include "artshield/kernels/kernels.hpp"

namespace artshield::kernels::reference {

double SquaredErrorSum(std::span<const double> a, std::span<const double> b);

// Direct 2-D evaluation with the outer product of `taps`.
Plane FilterValid(const Plane& in, std::span<const double> taps);

Plane Convolve2DReflect(const Plane& in, std::span<const double> kernel,
                        int ksize);

void SoftmaxRows(std::span<double> m, int rows, int cols);

double SpanMean(std::span<const double> attention, int heads, int queries,
                int tokens, std::span<const int> span);

}  // namespace artshield::kernels::reference

#endif  // ARTSHIELD_KERNELS_REFERENCE_HPP_
