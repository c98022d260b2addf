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

#ifndef ARTSHIELD_BACKEND_TYPES_HPP_
#define ARTSHIELD_BACKEND_TYPES_HPP_

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "artshield/backend/layer_id.hpp"

namespace artshield {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct LatentGeometry {
  int channels = 0;
  int height = 0;
  int width = 0;

  int positions() const { return height * width; }
  int size() const { return channels * height * width; }
  bool operator==(const LatentGeometry&) const = default;
};

struct ImageGeometry {
  int height = 0;
  int width = 0;
  int channels = 0;
};

// Channel-first latent tensor [c, h, w].
struct LatentImage {
  LatentGeometry geometry;
  std::vector<double> data;
  // Encoder scaling factor applied after the projection.
  double scale = 1.0;

  static LatentImage Zeros(const LatentGeometry& g, double scale = 1.0) {
    return LatentImage{g, std::vector<double>(g.size(), 0.0), scale};
  }
};

enum class TokenRole { kStyle, kContent };

struct PromptEmbedding {
  std::string text;
  // Padded token ids, length max_length.
  std::vector<int> tokens;
  // Non-padding token count (BOS and EOS included).
  int length = 0;
  // [max_length, text_dim]
  RowMatrix embedding;
  // Token positions per role; filled by span resolution.
  std::map<TokenRole, std::vector<int>> spans;
};

// Softmax attention of one cross-attention layer, laid out
// [heads][queries][tokens].
struct AttentionRecord {
  CrossAttnLayerId layer;
  int heads = 0;
  int queries = 0;
  int tokens = 0;
  std::vector<double> map;

  double at(int h, int q, int tok) const {
    return map[(static_cast<std::size_t>(h) * queries + q) * tokens + tok];
  }
};

}  // namespace artshield

#endif  // ARTSHIELD_BACKEND_TYPES_HPP_
