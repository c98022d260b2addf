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

#include "artshield/pipeline/compare.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "artshield/core/errors.hpp"
#include "artshield/eval/report.hpp"

namespace artshield {
namespace {

namespace fs = std::filesystem;

std::map<std::string, double> ReadTiming(const fs::path& path) {
  std::map<std::string, double> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() == 4 && cells[2] == "none" && !cells[3].empty()) {
      out[cells[0] + "," + cells[1]] = std::stod(cells[3]);
    }
  }
  return out;
}

struct Accumulator {
  std::map<std::string, std::pair<double, int>> sums;
  void Add(const std::string& metric, std::optional<double> v) {
    if (!v) return;
    auto& [sum, n] = sums[metric];
    sum += *v;
    ++n;
  }
  std::map<std::string, double> Means() const {
    std::map<std::string, double> out;
    for (const auto& [k, v] : sums) out[k] = v.first / v.second;
    return out;
  }
};

}  // namespace

bool HigherIsBetter(std::string_view metric) {
  return metric == "psnr_db" || metric == "ssim" || metric == "artfid";
}

ComparisonTable CompareReport(std::span<const fs::path> run_dirs) {
  if (run_dirs.empty()) throw ConfigError("compare needs at least one run");
  ComparisonTable table;
  std::optional<ComparisonRow> clean;
  std::set<std::string> labels;
  for (const auto& dir : run_dirs) {
    const fs::path csv = dir / "report.csv";
    if (!fs::exists(csv)) {
      throw NotFoundError("no report.csv in " + dir.string());
    }
    const auto reports = ReadReportCsv(csv);
    const auto timing = ReadTiming(dir / "timing.csv");
    std::map<std::string, Accumulator> by_method;
    std::vector<std::string> order;
    for (const auto& r : reports) {
      if (r.transform != TransformTag::kNone) continue;
      if (!by_method.count(r.method)) order.push_back(r.method);
      Accumulator& acc = by_method[r.method];
      for (const auto& metric : ReportMetricNames()) {
        if (metric == "runtime_s_per_img") {
          const auto it = timing.find(r.artist + "," + r.method);
          if (it != timing.end()) acc.Add(metric, it->second);
        } else {
          acc.Add(metric, MetricValue(r, metric));
        }
      }
    }
    for (const auto& method : order) {
      ComparisonRow row{method, by_method[method].Means()};
      if (method == "clean") {
        if (!clean) clean = row;
        continue;
      }
      if (!labels.insert(row.method).second) {
        row.method += " (" + dir.filename().string() + ")";
        labels.insert(row.method);
      }
      table.rows.push_back(std::move(row));
    }
  }
  if (clean) table.rows.insert(table.rows.begin(), *clean);
  return table;
}

std::string RenderComparison(const ComparisonTable& table) {
  const auto& metrics = ReportMetricNames();
  // Rank per metric among non-clean rows.
  std::map<std::string, std::vector<std::size_t>> ranked;
  for (const auto& metric : metrics) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      if (table.rows[i].method != "clean" &&
          table.rows[i].metrics.count(metric)) {
        idx.push_back(i);
      }
    }
    const bool higher = HigherIsBetter(metric);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      const double va = table.rows[a].metrics.at(metric);
      const double vb = table.rows[b].metrics.at(metric);
      return higher ? va > vb : va < vb;
    });
    ranked[metric] = idx;
  }
  std::ostringstream out;
  out << "| Method | PSNR | SSIM | LPIPS | ArtFID | CSD | Runtime (s/img) |\n"
      << "|---|---|---|---|---|---|---|\n";
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    out << "| " << row.method;
    for (const auto& metric : metrics) {
      const auto it = row.metrics.find(metric);
      if (it == row.metrics.end()) {
        out << " | n/a";
        continue;
      }
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.4f", it->second);
      std::string cell = buf;
      const auto& order = ranked[metric];
      if (!order.empty() && order[0] == i) {
        cell = "**" + cell + "**";
      } else if (order.size() > 1 && order[1] == i) {
        cell = "<u>" + cell + "</u>";
      }
      out << " | " << cell;
    }
    out << " |\n";
  }
  return out.str();
}

}  // namespace artshield
