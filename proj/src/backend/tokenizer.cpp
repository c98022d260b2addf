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

#include "artshield/backend/tokenizer.hpp"

#include <cctype>

#include "artshield/core/errors.hpp"
#include "artshield/core/hash.hpp"

namespace artshield {
namespace {

bool IsAlnum(char c) { return std::isalnum(static_cast<unsigned char>(c)); }
bool IsUpper(char c) { return std::isupper(static_cast<unsigned char>(c)); }
bool IsLower(char c) { return std::islower(static_cast<unsigned char>(c)); }

}  // namespace

Tokenizer::Tokenizer(int vocab_size, int max_length)
    : vocab_size_(vocab_size), max_length_(max_length) {
  if (vocab_size <= kFirstPieceId || max_length < 3) {
    throw ConfigError("tokenizer needs vocab > 3 and max_length >= 3");
  }
}

std::vector<std::string> Tokenizer::Pieces(std::string_view text) const {
  std::vector<std::string> words;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) words.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (!IsAlnum(c)) {
      flush();
      continue;
    }
    // Camel-case boundary: "ClaudeMonet" -> "claude", "monet".
    if (IsUpper(c) && i > 0 && IsLower(text[i - 1])) flush();
    current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  flush();

  std::vector<std::string> pieces;
  for (const auto& w : words) {
    for (std::size_t pos = 0; pos < w.size(); pos += kMaxPiece) {
      pieces.push_back(w.substr(pos, kMaxPiece));
    }
  }
  return pieces;
}

int Tokenizer::PieceId(std::string_view piece) const {
  const auto span = static_cast<std::uint64_t>(vocab_size_ - kFirstPieceId);
  return kFirstPieceId + static_cast<int>(HashString(piece) % span);
}

Tokenizer::Encoding Tokenizer::Encode(std::string_view text) const {
  Encoding enc;
  enc.ids.assign(max_length_, kPad);
  auto pieces = Pieces(text);
  if (static_cast<int>(pieces.size()) > max_length_ - 2) {
    pieces.resize(max_length_ - 2);
  }
  enc.ids[0] = kBos;
  enc.pieces.push_back("<bos>");
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    enc.ids[i + 1] = PieceId(pieces[i]);
    enc.pieces.push_back(pieces[i]);
  }
  enc.ids[pieces.size() + 1] = kEos;
  enc.pieces.push_back("<eos>");
  enc.length = static_cast<int>(pieces.size()) + 2;
  return enc;
}

}  // namespace artshield
