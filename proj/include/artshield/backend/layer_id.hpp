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

#ifndef ARTSHIELD_BACKEND_LAYER_ID_HPP_
#define ARTSHIELD_BACKEND_LAYER_ID_HPP_

#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace artshield {

enum class BlockKind { kDown = 0, kMid = 1, kUp = 2 };

// Identity of one cross-attention layer, named the way diffusers names the
// Stable Diffusion U-Net modules ("down_blocks.2.attentions.1",
// "mid_block.attentions.0", "up_blocks.1.attentions.2"). The ordering is the
// enumeration order down -> mid -> up.
struct CrossAttnLayerId {
  BlockKind block = BlockKind::kDown;
  int block_index = 0;
  int attn_index = 0;

  std::string canonical_name() const;
  // Throws NotFoundError for malformed names.
  static CrossAttnLayerId Parse(std::string_view name);

  auto operator<=>(const CrossAttnLayerId&) const = default;
};

// The 16-layer Stable Diffusion v1.x layout: 6 down, 1 mid, 9 up.
std::vector<CrossAttnLayerId> ReferenceLayerLayout();

// One cross-attention layer per level: down_blocks.0, mid_block, up_blocks.0.
std::vector<CrossAttnLayerId> CompactLayerLayout();

}  // namespace artshield

#endif  // ARTSHIELD_BACKEND_LAYER_ID_HPP_
