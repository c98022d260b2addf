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

#include "artshield/eval/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "artshield/core/errors.hpp"
#include "artshield/eval/metrics.hpp"

namespace artshield {
namespace {

constexpr std::string_view kReportHeader =
    "artist,method,transform,psnr_db,ssim,lpips,artfid,csd_cos";

std::string Format(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Runs `fn` and stores its value, or records why it was skipped.
template <typename Fn>
void Measure(EvalReport& report, const std::string& metric,
             std::optional<double>& slot, bool available,
             std::string_view unavailable_reason, Fn&& fn) {
  if (!available) {
    report.omitted[metric] = std::string(unavailable_reason);
    return;
  }
  try {
    slot = fn();
  } catch (const ProviderError& e) {
    report.omitted[metric] = std::string("provider failed: ") + e.what();
  }
}

void FillInvisibility(EvalReport& report, std::span<const ImageTensor> clean,
                      std::span<const ImageTensor> protected_images,
                      const ProviderSet& providers) {
  if (clean.size() != protected_images.size()) {
    throw DimensionError("clean and protected sets differ in size");
  }
  if (clean.empty()) {
    for (const char* m : {"psnr_db", "ssim", "lpips"}) {
      report.omitted[m] = "no images";
    }
    return;
  }
  const double n = static_cast<double>(clean.size());
  double psnr = 0.0, ssim = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    psnr += Psnr(clean[i], protected_images[i]) / n;
    ssim += Ssim(clean[i], protected_images[i]) / n;
  }
  report.psnr_db = psnr;
  report.ssim = ssim;
  Measure(report, "lpips", report.lpips, providers.perceptual != nullptr,
          "no perceptual provider", [&] {
            double sum = 0.0;
            for (std::size_t i = 0; i < clean.size(); ++i) {
              sum += Lpips(clean[i], protected_images[i], *providers.perceptual);
            }
            return sum / n;
          });
}

void FillProtection(EvalReport& report, std::span<const ImageTensor> generated,
                    std::span<const ImageTensor> originals,
                    const ProviderSet& providers) {
  if (generated.empty() || originals.empty()) {
    report.omitted["artfid"] = "no generated images";
    report.omitted["csd_cos"] = "no generated images";
    return;
  }
  const bool enough = generated.size() >= 2 && originals.size() >= 2;
  Measure(report, "artfid", report.artfid,
          enough && providers.features && providers.perceptual,
          enough ? "no feature or perceptual provider"
                 : "needs at least 2 images per set",
          [&] {
            const ArtFidResult r = ArtFid(generated, originals,
                                          *providers.features,
                                          *providers.perceptual);
            if (r.shrinkage > 0.0) {
              report.metadata["artfid_shrinkage"] = Format(r.shrinkage);
            }
            return r.value;
          });
  Measure(report, "csd_cos", report.csd_cos, providers.style != nullptr,
          "no style provider",
          [&] { return CsdCosine(generated, originals, *providers.style); });
}

void Stamp(EvalReport& report, const ProviderSet& providers,
           TransformTag transform) {
  report.transform = transform;
  report.metadata["csd_estimator"] = "pairwise_mean";
  report.metadata["artfid_lpips_factor"] = "mean_min_over_originals";
  if (providers.style) report.metadata["style_provider"] = providers.style->name();
  if (providers.perceptual) {
    report.metadata["perceptual_provider"] = providers.perceptual->name();
  }
  if (providers.features) {
    report.metadata["feature_provider"] = providers.features->name();
  }
}

}  // namespace

std::string_view TransformTagName(TransformTag tag) {
  switch (tag) {
    case TransformTag::kNone:
      return "none";
    case TransformTag::kJpeg75:
      return "jpeg75";
    case TransformTag::kBlur3:
      return "blur3";
  }
  return "";
}

TransformTag ParseTransformTag(std::string_view name) {
  if (name == "none") return TransformTag::kNone;
  if (name == "jpeg75") return TransformTag::kJpeg75;
  if (name == "blur3") return TransformTag::kBlur3;
  throw ConfigError("unknown transform: " + std::string(name));
}

ImageTensor ApplyTransform(const ImageTensor& image, TransformTag tag) {
  switch (tag) {
    case TransformTag::kNone:
      return image;
    case TransformTag::kJpeg75:
      return JpegTransform(image, 75);
    case TransformTag::kBlur3:
      return GaussianBlur(image, 3, 0.05);
  }
  return image;
}

const std::vector<std::string>& ReportMetricNames() {
  static const std::vector<std::string> kNames = {
      "psnr_db", "ssim", "lpips", "artfid", "csd_cos", "runtime_s_per_img"};
  return kNames;
}

std::optional<double> MetricValue(const EvalReport& report,
                                  std::string_view metric) {
  if (metric == "psnr_db") return report.psnr_db;
  if (metric == "ssim") return report.ssim;
  if (metric == "lpips") return report.lpips;
  if (metric == "artfid") return report.artfid;
  if (metric == "csd_cos") return report.csd_cos;
  if (metric == "runtime_s_per_img") return report.runtime_s_per_img;
  throw NotFoundError("unknown metric: " + std::string(metric));
}

std::pair<EvalReport, EvalReport> EvaluateRun(const EvalInputs& inputs,
                                              const ProviderSet& providers,
                                              TransformTag transform,
                                              std::string method) {
  EvalReport baseline;
  baseline.method = "clean";
  Stamp(baseline, providers, transform);
  FillInvisibility(baseline, inputs.clean, inputs.clean, providers);
  FillProtection(baseline, inputs.generated_from_clean, inputs.originals,
                 providers);

  EvalReport prot;
  prot.method = std::move(method);
  Stamp(prot, providers, transform);
  FillInvisibility(prot, inputs.clean, inputs.protected_images, providers);
  FillProtection(prot, inputs.generated_from_protected, inputs.originals,
                 providers);
  return {std::move(baseline), std::move(prot)};
}

void WriteReportCsv(std::span<const EvalReport> reports,
                    const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << kReportHeader << '\n';
  for (const auto& r : reports) {
    out << r.artist << ',' << r.method << ',' << TransformTagName(r.transform);
    for (const auto& metric : ReportMetricNames()) {
      if (metric == "runtime_s_per_img") continue;
      const auto v = MetricValue(r, metric);
      out << ',' << (v ? Format(*v) : "");
    }
    out << '\n';
  }
}

std::vector<EvalReport> ReadReportCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != kReportHeader) {
    throw ConfigError("report schema mismatch in " + path.string());
  }
  std::vector<EvalReport> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = SplitCsv(line);
    if (cells.size() != 8) {
      throw ConfigError("malformed report row in " + path.string());
    }
    EvalReport r;
    r.artist = cells[0];
    r.method = cells[1];
    r.transform = ParseTransformTag(cells[2]);
    std::optional<double>* slots[] = {&r.psnr_db, &r.ssim, &r.lpips,
                                      &r.artfid, &r.csd_cos};
    for (int i = 0; i < 5; ++i) {
      if (!cells[3 + i].empty()) *slots[i] = std::stod(cells[3 + i]);
    }
    out.push_back(std::move(r));
  }
  return out;
}

void WriteTimingCsv(std::span<const EvalReport> reports,
                    const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "artist,method,transform,runtime_s_per_img\n";
  for (const auto& r : reports) {
    out << r.artist << ',' << r.method << ',' << TransformTagName(r.transform)
        << ',' << (r.runtime_s_per_img ? Format(*r.runtime_s_per_img) : "")
        << '\n';
  }
}

std::string SummaryTable(std::span<const EvalReport> reports) {
  std::ostringstream out;
  out << "| Artist | Method | Transform | PSNR | SSIM | LPIPS | ArtFID | CSD | "
         "Runtime (s/img) |\n";
  out << "|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : reports) {
    out << "| " << r.artist << " | " << r.method << " | "
        << TransformTagName(r.transform);
    for (const auto& metric : ReportMetricNames()) {
      const auto v = MetricValue(r, metric);
      char buf[32];
      if (v) std::snprintf(buf, sizeof(buf), "%.4f", *v);
      out << " | " << (v ? buf : "n/a");
    }
    out << " |\n";
  }
  return out.str();
}

}  // namespace artshield
