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

#ifndef ARTSHIELD_BACKEND_PARAMS_HPP_
#define ARTSHIELD_BACKEND_PARAMS_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "artshield/backend/types.hpp"

namespace artshield {

// Owner tag for parameters outside any cross-attention layer.
inline constexpr int kCoreOwner = -1;
// Owner tag for fixed tensors (encoder projection, token table) that are
// stored with the weights but never trained.
inline constexpr int kFrozenOwner = -2;

struct Parameter {
  std::string name;
  // Index into the backbone's layer list, or kCoreOwner / kFrozenOwner.
  int owner = kCoreOwner;
  RowMatrix value;
};

// Per-parameter gradients aligned with ParamStore::entries(). Entries for
// parameters that were not differentiated are left empty (0 x 0).
using GradientSet = std::vector<RowMatrix>;

class ParamStore {
 public:
  int Add(std::string name, int owner, RowMatrix value);

  const std::vector<Parameter>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  RowMatrix& value(int index) { return entries_[index].value; }
  const RowMatrix& value(int index) const { return entries_[index].value; }
  // Throws NotFoundError.
  int IndexOf(std::string_view name) const;

  std::uint64_t Hash() const;
  std::uint64_t HashOwner(int owner) const;

  // Binary format: magic, count, then per entry name, owner, rows, cols and
  // little-endian doubles.
  void Save(const std::filesystem::path& path) const;
  // Overwrites values from `path`; names, owners and shapes must match.
  void LoadValuesFrom(const std::filesystem::path& path);

  GradientSet ZeroGradients() const;

 private:
  std::vector<Parameter> entries_;
};

void AccumulateGradients(GradientSet& into, const GradientSet& from,
                         double weight = 1.0);

class AdamOptimizer {
 public:
  explicit AdamOptimizer(double learning_rate, double beta1 = 0.9,
                         double beta2 = 0.999, double epsilon = 1e-8)
      : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {}

  // Updates only entries with mask[i] set and a non-empty gradient.
  void Step(ParamStore& params, const GradientSet& grads,
            const std::vector<bool>& mask);

  int steps() const { return step_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  int step_ = 0;
  std::vector<RowMatrix> m_, v_;
};

}  // namespace artshield

#endif  // ARTSHIELD_BACKEND_PARAMS_HPP_
