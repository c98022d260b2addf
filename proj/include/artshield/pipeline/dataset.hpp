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

#ifndef ARTSHIELD_PIPELINE_DATASET_HPP_
#define ARTSHIELD_PIPELINE_DATASET_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "artshield/core/image.hpp"

namespace artshield {

enum class SourceTag { kWikiartRefined, kAnita, kCustom };

std::string_view SourceTagName(SourceTag tag);
SourceTag ParseSourceTag(std::string_view name);

inline constexpr int kMinImagesPerEntry = 3;
inline constexpr int kMaxImagesPerEntry = 5;

struct DatasetEntry {
  std::string id;
  std::vector<std::filesystem::path> images;
  SourceTag source = SourceTag::kCustom;
};

struct DatasetManifest {
  std::filesystem::path root;
  std::vector<DatasetEntry> entries;
  // One line per skipped folder or file.
  std::vector<std::string> diagnostics;

  const DatasetEntry& Find(std::string_view id) const;
};

// One folder per artist or style. Folders directly under a top-level
// "wikiart_refined", "anita" or "custom" directory take that tag; otherwise
// a SOURCE file in the folder names the tag, defaulting to custom. Folders
// outside the 3-5 image range are skipped with a diagnostic. Throws
// NotFoundError for a missing or empty root and IoError for unreadable images.
DatasetManifest Ingest(const std::filesystem::path& root);

nlohmann::json ToJson(const DatasetManifest& manifest);

// Loads and resizes an entry's images to `size` x `size`, tagged with their
// file names.
std::vector<ImageTensor> LoadEntryImages(const DatasetEntry& entry, int size);

// Procedural texture standing in for one artwork of a given style.
ImageTensor SyntheticArtwork(int style, int index, int size);

// Writes `artists` folders of `per_artist` synthetic PNGs under `root`.
void WriteSyntheticFixtures(const std::filesystem::path& root, int artists,
                            int per_artist, int size);

}  // namespace artshield

#endif  // ARTSHIELD_PIPELINE_DATASET_HPP_
