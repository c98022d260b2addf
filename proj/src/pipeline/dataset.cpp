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

#include "artshield/pipeline/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "artshield/core/errors.hpp"
#include "artshield/core/rng.hpp"
#include "artshield/io/image_io.hpp"

namespace artshield {
namespace {

namespace fs = std::filesystem;

std::vector<fs::path> SortedSubdirs(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_directory()) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool IsSourceDir(const fs::path& dir) {
  const std::string name = dir.filename().string();
  return name == "wikiart_refined" || name == "anita" || name == "custom";
}

SourceTag TagFromFile(const fs::path& dir) {
  std::ifstream in(dir / "SOURCE");
  std::string name;
  if (in >> name) return ParseSourceTag(name);
  return SourceTag::kCustom;
}

}  // namespace

std::string_view SourceTagName(SourceTag tag) {
  switch (tag) {
    case SourceTag::kWikiartRefined:
      return "wikiart_refined";
    case SourceTag::kAnita:
      return "anita";
    case SourceTag::kCustom:
      return "custom";
  }
  return "";
}

SourceTag ParseSourceTag(std::string_view name) {
  if (name == "wikiart_refined") return SourceTag::kWikiartRefined;
  if (name == "anita") return SourceTag::kAnita;
  if (name == "custom") return SourceTag::kCustom;
  throw ConfigError("unknown source tag: " + std::string(name));
}

const DatasetEntry& DatasetManifest::Find(std::string_view id) const {
  for (const auto& e : entries) {
    if (e.id == id) return e;
  }
  throw NotFoundError("no dataset entry named " + std::string(id));
}

DatasetManifest Ingest(const fs::path& root) {
  if (!fs::is_directory(root)) {
    throw NotFoundError("dataset root " + root.string() + " is not a directory");
  }
  DatasetManifest manifest;
  manifest.root = root;
  std::vector<std::pair<fs::path, SourceTag>> folders;
  for (const auto& dir : SortedSubdirs(root)) {
    if (IsSourceDir(dir)) {
      const SourceTag tag = ParseSourceTag(dir.filename().string());
      for (const auto& sub : SortedSubdirs(dir)) folders.emplace_back(sub, tag);
    } else {
      folders.emplace_back(dir, TagFromFile(dir));
    }
  }
  std::set<std::string> ids;
  for (const auto& [dir, tag] : folders) {
    const std::string id = dir.filename().string();
    const auto images = ListImages(dir);
    const int n = static_cast<int>(images.size());
    if (n < kMinImagesPerEntry || n > kMaxImagesPerEntry) {
      manifest.diagnostics.push_back(
          "skipped " + dir.string() + ": " + std::to_string(n) +
          " images (expected " + std::to_string(kMinImagesPerEntry) + "-" +
          std::to_string(kMaxImagesPerEntry) + ")");
      continue;
    }
    if (!ids.insert(id).second) {
      manifest.diagnostics.push_back("skipped " + dir.string() +
                                     ": duplicate id " + id);
      continue;
    }
    for (const auto& p : images) {
      std::ifstream probe(p, std::ios::binary);
      if (!probe || probe.peek() == std::ifstream::traits_type::eof()) {
        throw IoError("cannot read image " + p.string());
      }
    }
    manifest.entries.push_back({id, images, tag});
  }
  if (manifest.entries.empty()) {
    throw NotFoundError("dataset root " + root.string() +
                        " has no usable artist folders");
  }
  return manifest;
}

nlohmann::json ToJson(const DatasetManifest& manifest) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : manifest.entries) {
    nlohmann::json images = nlohmann::json::array();
    for (const auto& p : e.images) {
      images.push_back(fs::relative(p, manifest.root).generic_string());
    }
    entries.push_back({{"id", e.id},
                       {"source", SourceTagName(e.source)},
                       {"images", images}});
  }
  return {{"entries", entries}, {"diagnostics", manifest.diagnostics}};
}

std::vector<ImageTensor> LoadEntryImages(const DatasetEntry& entry, int size) {
  std::vector<ImageTensor> out;
  for (const auto& p : entry.images) {
    ImageTensor img = ReadImage(p);
    if (img.height != size || img.width != size) {
      img = ResizeBilinear(img, size, size);
    }
    img.provenance = Provenance::kClean;
    img.tag = p.filename().string();
    out.push_back(std::move(img));
  }
  return out;
}

ImageTensor SyntheticArtwork(int style, int index, int size) {
  ImageTensor img = ImageTensor::Filled(size, size, 3, 0.0);
  Rng rng(DeriveSeed(static_cast<std::uint64_t>(style) * 100 + index, "art"));
  const double fx = 0.2 + 0.1 * style;
  const double fy = 0.15 + 0.05 * index;
  const double phase = rng.Uniform() * 6.0;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      for (int c = 0; c < 3; ++c) {
        const double v = 0.5 + 0.3 * std::sin(fx * x + fy * y + phase + c) *
                                   std::cos(0.05 * (x - y) * (style + 1));
        img.at(y, x, c) = std::clamp(v + 0.05 * rng.Normal(), 0.0, 1.0);
      }
    }
  }
  img.tag = "style" + std::to_string(style) + "_" + std::to_string(index);
  return img;
}

void WriteSyntheticFixtures(const fs::path& root, int artists, int per_artist,
                            int size) {
  for (int a = 0; a < artists; ++a) {
    const fs::path dir = root / ("artist_" + std::to_string(a));
    for (int i = 0; i < per_artist; ++i) {
      WritePng(SyntheticArtwork(a, i, size),
               dir / ("work_" + std::to_string(i) + ".png"));
    }
  }
}

}  // namespace artshield
