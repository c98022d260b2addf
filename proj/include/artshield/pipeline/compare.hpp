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

#ifndef ARTSHIELD_PIPELINE_COMPARE_HPP_
#define ARTSHIELD_PIPELINE_COMPARE_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace artshield {

struct ComparisonRow {
  std::string method;
  // Metric name -> mean over artists; missing when every artist omitted it.
  std::map<std::string, double> metrics;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
};

// Rows for the clean baseline (once) and each run's protected method, from
// the untransformed rows of each run's report.csv and timing.csv. Duplicate
// method labels get the run directory name appended. Throws ConfigError on
// a schema mismatch.
ComparisonTable CompareReport(std::span<const std::filesystem::path> run_dirs);

// True when larger values mean a better protection method.
bool HigherIsBetter(std::string_view metric);

// Markdown table; per metric the best method is bold and the second best
// underlined. The clean row is never ranked.
std::string RenderComparison(const ComparisonTable& table);

}  // namespace artshield

#endif  // ARTSHIELD_PIPELINE_COMPARE_HPP_
