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

#include "artshield/backend/params.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "artshield/core/errors.hpp"
#include "artshield/core/hash.hpp"

namespace artshield {
namespace {

constexpr char kMagic[8] = {'A', 'S', 'W', 'T', '0', '0', '0', '1'};

static_assert(std::endian::native == std::endian::little,
              "weight files are little-endian");

template <typename T>
void WriteValue(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T ReadValue(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw IoError("truncated weight file");
  return v;
}

void HashMatrix(Fnv1a& h, const Parameter& p) {
  h.Update(p.name);
  h.UpdateValue(p.value.rows());
  h.UpdateValue(p.value.cols());
  h.Update(std::span<const double>(p.value.data(), p.value.size()));
}

}  // namespace

int ParamStore::Add(std::string name, int owner, RowMatrix value) {
  entries_.push_back({std::move(name), owner, std::move(value)});
  return static_cast<int>(entries_.size()) - 1;
}

int ParamStore::IndexOf(std::string_view name) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].name == name) return static_cast<int>(i);
  }
  throw NotFoundError("no parameter named '" + std::string(name) + "'");
}

std::uint64_t ParamStore::Hash() const {
  Fnv1a h;
  for (const auto& p : entries_) HashMatrix(h, p);
  return h.digest();
}

std::uint64_t ParamStore::HashOwner(int owner) const {
  Fnv1a h;
  for (const auto& p : entries_) {
    if (p.owner == owner) HashMatrix(h, p);
  }
  return h.digest();
}

void ParamStore::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(kMagic, sizeof(kMagic));
  WriteValue(out, static_cast<std::uint32_t>(entries_.size()));
  for (const auto& p : entries_) {
    WriteValue(out, static_cast<std::uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    WriteValue(out, static_cast<std::int32_t>(p.owner));
    WriteValue(out, static_cast<std::uint32_t>(p.value.rows()));
    WriteValue(out, static_cast<std::uint32_t>(p.value.cols()));
    out.write(reinterpret_cast<const char*>(p.value.data()),
              static_cast<std::streamsize>(p.value.size() * sizeof(double)));
  }
  if (!out) throw IoError("failed writing " + path.string());
}

void ParamStore::LoadValuesFrom(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw IoError(path.string() + ": not a weight file");
  }
  const auto count = ReadValue<std::uint32_t>(in);
  if (count != entries_.size()) {
    throw IoError(path.string() + ": parameter count mismatch");
  }
  for (auto& p : entries_) {
    const auto len = ReadValue<std::uint32_t>(in);
    std::string name(len, '\0');
    in.read(name.data(), len);
    const auto owner = ReadValue<std::int32_t>(in);
    const auto rows = ReadValue<std::uint32_t>(in);
    const auto cols = ReadValue<std::uint32_t>(in);
    if (name != p.name || owner != p.owner ||
        rows != static_cast<std::uint32_t>(p.value.rows()) ||
        cols != static_cast<std::uint32_t>(p.value.cols())) {
      throw IoError(path.string() + ": layout mismatch at '" + p.name + "'");
    }
    in.read(reinterpret_cast<char*>(p.value.data()),
            static_cast<std::streamsize>(p.value.size() * sizeof(double)));
    if (!in) throw IoError("truncated weight file " + path.string());
  }
}

GradientSet ParamStore::ZeroGradients() const {
  GradientSet g(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    g[i] = RowMatrix::Zero(entries_[i].value.rows(), entries_[i].value.cols());
  }
  return g;
}

void AccumulateGradients(GradientSet& into, const GradientSet& from,
                         double weight) {
  if (into.size() < from.size()) into.resize(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) {
    if (from[i].size() == 0) continue;
    if (into[i].size() == 0) {
      into[i] = weight * from[i];
    } else {
      into[i] += weight * from[i];
    }
  }
}

void AdamOptimizer::Step(ParamStore& params, const GradientSet& grads,
                         const std::vector<bool>& mask) {
  if (m_.empty()) {
    m_.resize(params.size());
    v_.resize(params.size());
  }
  ++step_;
  const double bc1 = 1.0 - std::pow(beta1_, step_);
  const double bc2 = 1.0 - std::pow(beta2_, step_);
  for (std::size_t i = 0; i < params.size() && i < grads.size(); ++i) {
    if (!mask[i] || grads[i].size() == 0) continue;
    const RowMatrix& g = grads[i];
    if (m_[i].size() == 0) {
      m_[i] = RowMatrix::Zero(g.rows(), g.cols());
      v_[i] = RowMatrix::Zero(g.rows(), g.cols());
    }
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g.cwiseProduct(g);
    RowMatrix& w = params.value(static_cast<int>(i));
    w.array() -= lr_ * (m_[i].array() / bc1) /
                 ((v_[i].array() / bc2).sqrt() + eps_);
  }
}

}  // namespace artshield
