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

#include "artshield/backend/layer_id.hpp"

#include <charconv>

#include "artshield/core/errors.hpp"

namespace artshield {
namespace {

bool ConsumePrefix(std::string_view& s, std::string_view prefix) {
  if (!s.starts_with(prefix)) return false;
  s.remove_prefix(prefix.size());
  return true;
}

bool ConsumeInt(std::string_view& s, int& out) {
  const auto* begin = s.data();
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr == begin || out < 0) return false;
  s.remove_prefix(static_cast<std::size_t>(ptr - begin));
  return true;
}

}  // namespace

std::string CrossAttnLayerId::canonical_name() const {
  switch (block) {
    case BlockKind::kDown:
      return "down_blocks." + std::to_string(block_index) + ".attentions." +
             std::to_string(attn_index);
    case BlockKind::kMid:
      return "mid_block.attentions." + std::to_string(attn_index);
    case BlockKind::kUp:
      return "up_blocks." + std::to_string(block_index) + ".attentions." +
             std::to_string(attn_index);
  }
  return {};
}

CrossAttnLayerId CrossAttnLayerId::Parse(std::string_view name) {
  CrossAttnLayerId id;
  std::string_view s = name;
  bool ok = false;
  if (ConsumePrefix(s, "mid_block.attentions.")) {
    id.block = BlockKind::kMid;
    ok = ConsumeInt(s, id.attn_index);
  } else {
    if (ConsumePrefix(s, "down_blocks.")) {
      id.block = BlockKind::kDown;
      ok = true;
    } else if (ConsumePrefix(s, "up_blocks.")) {
      id.block = BlockKind::kUp;
      ok = true;
    }
    ok = ok && ConsumeInt(s, id.block_index) &&
         ConsumePrefix(s, ".attentions.") && ConsumeInt(s, id.attn_index);
  }
  if (!ok || !s.empty()) {
    throw NotFoundError("malformed cross-attention layer name '" +
                        std::string(name) + "'");
  }
  return id;
}

std::vector<CrossAttnLayerId> ReferenceLayerLayout() {
  std::vector<CrossAttnLayerId> ids;
  for (int b = 0; b < 3; ++b) {
    for (int a = 0; a < 2; ++a) ids.push_back({BlockKind::kDown, b, a});
  }
  ids.push_back({BlockKind::kMid, 0, 0});
  for (int b = 1; b <= 3; ++b) {
    for (int a = 0; a < 3; ++a) ids.push_back({BlockKind::kUp, b, a});
  }
  return ids;
}

std::vector<CrossAttnLayerId> CompactLayerLayout() {
  return {{BlockKind::kDown, 0, 0}, {BlockKind::kMid, 0, 0},
          {BlockKind::kUp, 0, 0}};
}

}  // namespace artshield
