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

#ifndef ARTSHIELD_EVAL_REPORT_HPP_
#define ARTSHIELD_EVAL_REPORT_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "artshield/core/image.hpp"
#include "artshield/providers/providers.hpp"

namespace artshield {

enum class TransformTag { kNone, kJpeg75, kBlur3 };

std::string_view TransformTagName(TransformTag tag);
TransformTag ParseTransformTag(std::string_view name);
// Identity for kNone, JPEG q75 or 3x3 blur with sigma 0.05 otherwise.
ImageTensor ApplyTransform(const ImageTensor& image, TransformTag tag);

struct EvalReport {
  // Row label, e.g. the protection method.
  std::string method;
  std::string artist;
  TransformTag transform = TransformTag::kNone;
  std::optional<double> psnr_db;
  std::optional<double> ssim;
  std::optional<double> lpips;
  std::optional<double> artfid;
  std::optional<double> csd_cos;
  // Kept out of the byte-compared CSV; see WriteTimingCsv.
  std::optional<double> runtime_s_per_img;
  // Metric name -> reason, for every metric left empty.
  std::map<std::string, std::string> omitted;
  std::map<std::string, std::string> metadata;
};

// Metric columns in table order.
const std::vector<std::string>& ReportMetricNames();
std::optional<double> MetricValue(const EvalReport& report,
                                  std::string_view metric);

struct EvalInputs {
  std::span<const ImageTensor> clean;
  std::span<const ImageTensor> protected_images;
  std::span<const ImageTensor> generated_from_clean;
  std::span<const ImageTensor> generated_from_protected;
  std::span<const ImageTensor> originals;
};

// Returns the unprotected baseline row and the protected row. Providers that
// are null or throw ProviderError leave their metric omitted with a reason.
std::pair<EvalReport, EvalReport> EvaluateRun(
    const EvalInputs& inputs, const ProviderSet& providers,
    TransformTag transform, std::string method = "StyleProtect");

// One row per report; empty cells for omitted metrics.
void WriteReportCsv(std::span<const EvalReport> reports,
                    const std::filesystem::path& path);
std::vector<EvalReport> ReadReportCsv(const std::filesystem::path& path);
void WriteTimingCsv(std::span<const EvalReport> reports,
                    const std::filesystem::path& path);

// Markdown table in the order PSNR, SSIM, LPIPS, ArtFID, CSD, runtime.
std::string SummaryTable(std::span<const EvalReport> reports);

}  // namespace artshield

#endif  // ARTSHIELD_EVAL_REPORT_HPP_
