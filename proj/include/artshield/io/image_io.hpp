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

#ifndef ARTSHIELD_IO_IMAGE_IO_HPP_
#define ARTSHIELD_IO_IMAGE_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "artshield/core/image.hpp"

namespace artshield {

// 8-bit PNG. Values are rounded to the nearest 1/255; 1- and 3-channel
// images are supported.
void WritePng(const ImageTensor& image, const std::filesystem::path& path);
// Reads PNG or JPEG (by extension), converting to RGB.
ImageTensor ReadImage(const std::filesystem::path& path);
bool IsImageFile(const std::filesystem::path& path);

// Baseline JPEG encode/decode in memory (libjpeg, 4:2:0, islow DCT).
std::vector<std::uint8_t> EncodeJpeg(const ImageTensor& image, int quality);
ImageTensor DecodeJpeg(std::span<const std::uint8_t> bytes);

// Sorted image files directly inside `dir`.
std::vector<std::filesystem::path> ListImages(const std::filesystem::path& dir);

}  // namespace artshield

#endif  // ARTSHIELD_IO_IMAGE_IO_HPP_
