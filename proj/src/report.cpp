// Copyright 2026 The Scatterfield Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "scatterfield/error.hpp"
#include "scatterfield/metrics.hpp"

namespace scatterfield {

double precision_of(std::size_t tp, std::size_t fp) noexcept {
  return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double recall_of(std::size_t tp, std::size_t fn) noexcept {
  return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double f1_of(double precision, double recall) noexcept {
  return precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
}

double DepthCounts::precision() const noexcept { return precision_of(tp, fp); }
double DepthCounts::recall() const noexcept { return recall_of(tp, fn); }
double DepthCounts::f1() const noexcept { return f1_of(precision(), recall()); }
double DetectionReport::precision() const noexcept { return precision_of(tp, fp); }
double DetectionReport::recall() const noexcept { return recall_of(tp, fn); }
double DetectionReport::f1() const noexcept { return f1_of(precision(), recall()); }

namespace {

std::size_t nearest_plane(const GridSpec& grid, double z_um) {
  const double k = std::round(grid.plane_of_z(z_um));
  return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(grid.planes - 1)));
}

}  // namespace

DetectionReport score(std::span<const Detection> detections, std::span<const Emitter> truth, const GridSpec& grid,
                      const MatchConfig& cfg, std::string sample_id) {
  const Assignment a = match_detections(detections, truth, cfg);
  DetectionReport report;
  report.sample_id = std::move(sample_id);
  report.bins.resize(grid.planes);
  for (std::size_t k = 0; k < grid.planes; ++k) {
    report.bins[k].plane = k;
    report.bins[k].z_um = grid.z_of_plane(static_cast<double>(k));
  }
  for (const Emitter& e : truth) ++report.bins[nearest_plane(grid, e.z_um)].emitters;
  for (const auto& [i, j] : a.pairs) ++report.bins[nearest_plane(grid, truth[j].z_um)].tp;
  for (std::size_t j : a.unmatched_truth) ++report.bins[nearest_plane(grid, truth[j].z_um)].fn;
  for (std::size_t i : a.unmatched_detections) ++report.bins[nearest_plane(grid, detections[i].z_um)].fp;
  report.tp = a.pairs.size();
  report.fp = a.unmatched_detections.size();
  report.fn = a.unmatched_truth.size();
  return report;
}

DetectionReport evaluate_volume(const Grid3& prediction, std::span<const Emitter> truth, const GridSpec& grid,
                                const MatchConfig& cfg, std::string sample_id) {
  cfg.validate();
  const std::vector<Detection> dets = detect(prediction, grid, cfg.intensity_threshold);
  return score(dets, truth, grid, cfg, std::move(sample_id));
}

std::vector<CurveRow> f1_vs_depth(std::span<const DetectionReport> reports, std::optional<double> ls_um,
                                  double surface_z_um) {
  if (ls_um) require(*ls_um > 0.0, ErrorKind::invalid_argument, "f1_vs_depth: scattering length must be positive");
  struct Accum {
    double z_um = 0.0;
    std::size_t tp = 0, fp = 0, fn = 0;
    std::vector<double> precision, recall, f1;
  };
  std::map<std::size_t, Accum> bins;
  for (const DetectionReport& r : reports)
    for (const DepthCounts& b : r.bins) {
      if (b.emitters == 0) continue;
      Accum& acc = bins[b.plane];
      acc.z_um = b.z_um;
      acc.tp += b.tp;
      acc.fp += b.fp;
      acc.fn += b.fn;
      acc.precision.push_back(b.precision());
      acc.recall.push_back(b.recall());
      acc.f1.push_back(b.f1());
    }

  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  std::vector<CurveRow> rows;
  for (const auto& [plane, acc] : bins) {
    CurveRow row;
    row.z_um = acc.z_um - surface_z_um;
    row.z_over_ls = ls_um ? row.z_um / *ls_um : std::numeric_limits<double>::quiet_NaN();
    row.tp = acc.tp;
    row.fp = acc.fp;
    row.fn = acc.fn;
    row.precision = mean(acc.precision);
    row.recall = mean(acc.recall);
    row.f1 = mean(acc.f1);
    row.samples = acc.f1.size();
    if (row.samples > 1) {
      double ss = 0.0;
      for (double x : acc.f1) ss += (x - row.f1) * (x - row.f1);
      const double n = static_cast<double>(row.samples);
      row.stderr_f1 = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    rows.push_back(row);
  }
  return rows;
}

std::string curve_csv(std::span<const CurveRow> rows) {
  std::ostringstream out;
  out << "z_um,z_over_ls,tp,fp,fn,precision,recall,f1,stderr\n" << std::setprecision(10);
  for (const CurveRow& r : rows) {
    out << r.z_um << ',';
    if (std::isnan(r.z_over_ls))
      out << "nan";
    else
      out << r.z_over_ls;
    out << ',' << r.tp << ',' << r.fp << ',' << r.fn << ',' << r.precision << ',' << r.recall << ',' << r.f1 << ','
        << r.stderr_f1 << '\n';
  }
  return out.str();
}

void write_curve_csv(const std::filesystem::path& path, std::span<const CurveRow> rows) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::io, "cannot open " + path.string() + " for writing");
  out << curve_csv(rows);
  require(static_cast<bool>(out), ErrorKind::io, "write failed: " + path.string());
}

void write_pca_csv(const std::filesystem::path& path, std::span<const PcaRow> rows) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::io, "cannot open " + path.string() + " for writing");
  out << "domain,pc1,pc2\n" << std::setprecision(12);
  for (const PcaRow& r : rows) out << r.domain << ',' << r.pc1 << ',' << r.pc2 << '\n';
  require(static_cast<bool>(out), ErrorKind::io, "write failed: " + path.string());
}

}  // namespace scatterfield
