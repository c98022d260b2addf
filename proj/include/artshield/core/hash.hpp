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

#ifndef ARTSHIELD_CORE_HASH_HPP_
#define ARTSHIELD_CORE_HASH_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace artshield {

// 64-bit FNV-1a. Stable across runs and platforms of the same endianness;
// used for parameter checksums, content addressing and seed derivation.
class Fnv1a {
 public:
  static constexpr std::uint64_t kOffset = 0xcbf29ce484222325ULL;
  static constexpr std::uint64_t kPrime = 0x100000001b3ULL;

  void Update(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      state_ ^= bytes[i];
      state_ *= kPrime;
    }
  }
  void Update(std::string_view s) { Update(s.data(), s.size()); }
  void Update(std::span<const double> values) {
    Update(values.data(), values.size_bytes());
  }
  template <typename T>
  void UpdateValue(const T& v) {
    Update(&v, sizeof(T));
  }

  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = kOffset;
};

inline std::uint64_t HashString(std::string_view s) {
  Fnv1a h;
  h.Update(s);
  return h.digest();
}

// Lower-case 16 digit hex rendering.
std::string HexDigest(std::uint64_t digest);

}  // namespace artshield

#endif  // ARTSHIELD_CORE_HASH_HPP_
