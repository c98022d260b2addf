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

#ifndef ARTSHIELD_BACKEND_TOKENIZER_HPP_
#define ARTSHIELD_BACKEND_TOKENIZER_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace artshield {

// Word-piece tokenizer for the toy text encoder. Text is split on
// non-alphanumerics and camel-case boundaries, lower-cased, and words longer
// than kMaxPiece characters are chunked. Pieces hash into a fixed vocabulary.
class Tokenizer {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kFirstPieceId = 3;
  static constexpr std::size_t kMaxPiece = 6;

  struct Encoding {
    // Length max_length: BOS, pieces, EOS, then PAD.
    std::vector<int> ids;
    // Piece text for every non-padding position; specials are "<bos>" etc.
    std::vector<std::string> pieces;
    // Number of non-padding positions.
    int length = 0;
  };

  Tokenizer(int vocab_size, int max_length);

  int vocab_size() const { return vocab_size_; }
  int max_length() const { return max_length_; }

  std::vector<std::string> Pieces(std::string_view text) const;
  int PieceId(std::string_view piece) const;
  // Truncates to max_length - 2 pieces.
  Encoding Encode(std::string_view text) const;

 private:
  int vocab_size_;
  int max_length_;
};

}  // namespace artshield

#endif  // ARTSHIELD_BACKEND_TOKENIZER_HPP_
