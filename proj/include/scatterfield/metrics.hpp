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

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scatterfield/grid.hpp"
#include "scatterfield/volume_synth.hpp"

namespace scatterfield {

struct Detection {
  double x_um = 0.0;
  double y_um = 0.0;
  double z_um = 0.0;
  double peak_value = 0.0;
};

enum class Matcher { hungarian, greedy };

std::string to_string(Matcher m);
Matcher matcher_from_string(const std::string& s);

struct MatchConfig {
  double intensity_threshold = 0.1;
  double lateral_tol_um = 8.3;
  double axial_tol_um = 25.0;
  Matcher matcher = Matcher::hungarian;

  void validate() const;
};

/// Voxels >= threshold, grouped into 26-connected components; one detection per
/// component at its intensity-weighted centroid.
std::vector<Detection> detect(const Grid3& volume, const GridSpec& grid, double threshold);

struct Assignment {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (detection, truth)
  std::vector<std::size_t> unmatched_detections;
  std::vector<std::size_t> unmatched_truth;
};

/// valid(i, j) marks admissible (detection i, truth j) pairs, cost(i, j) their
/// preference (lower first). Returns a one-to-one assignment of maximum size;
/// among those the Hungarian variant minimises total cost.
Assignment match_pairs(std::size_t detections, std::size_t truths, const std::vector<std::vector<char>>& valid,
                       const std::vector<std::vector<double>>& cost, Matcher matcher);

Assignment match_detections(std::span<const Detection> detections, std::span<const Emitter> truth,
                            const MatchConfig& cfg);

struct DepthCounts {
  std::size_t plane = 0;
  double z_um = 0.0;
  std::size_t emitters = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  double precision() const noexcept;
  double recall() const noexcept;
  double f1() const noexcept;
};

struct DetectionReport {
  std::string sample_id;
  std::vector<DepthCounts> bins;  // one per reconstruction plane
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  double precision() const noexcept;
  double recall() const noexcept;
  double f1() const noexcept;
};

double precision_of(std::size_t tp, std::size_t fp) noexcept;
double recall_of(std::size_t tp, std::size_t fn) noexcept;
double f1_of(double precision, double recall) noexcept;

/// Matches and bins by plane: emitters by their nearest plane, false positives
/// by the nearest plane of the detection.
DetectionReport score(std::span<const Detection> detections, std::span<const Emitter> truth, const GridSpec& grid,
                      const MatchConfig& cfg, std::string sample_id = {});

/// detect followed by score.
DetectionReport evaluate_volume(const Grid3& prediction, std::span<const Emitter> truth, const GridSpec& grid,
                                const MatchConfig& cfg, std::string sample_id = {});

struct CurveRow {
  double z_um = 0.0;        // depth below the surface
  double z_over_ls = 0.0;   // NaN without a scattering length
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;   // means over samples with emitters in the bin
  double recall = 0.0;
  double f1 = 0.0;
  double stderr_f1 = 0.0;
  std::size_t samples = 0;
};

/// Per-depth means and standard errors across samples; bins with no emitters
/// in any sample are omitted.
std::vector<CurveRow> f1_vs_depth(std::span<const DetectionReport> reports, std::optional<double> ls_um,
                                  double surface_z_um);

void write_curve_csv(const std::filesystem::path& path, std::span<const CurveRow> rows);
std::string curve_csv(std::span<const CurveRow> rows);

// --- PCA -------------------------------------------------------------------------

inline constexpr std::size_t kPatchSize = 32;

struct PatchSite {
  std::size_t image = 0;
  long row = 0;
  long col = 0;
  std::string domain;
};

std::vector<std::vector<double>> extract_patches(std::span<const Image> images, std::span<const PatchSite> sites,
                                                 std::size_t size = kPatchSize);

struct PcaModel {
  std::vector<double> mean;
  std::vector<std::vector<double>> axes;     // unit vectors, decreasing variance
  std::vector<double> variances;             // eigenvalues of the covariance
  std::vector<std::vector<double>> scores;   // per patch, one per axis
};

/// Principal axes of the centred patches. Throws with fewer than two patches.
PcaModel fit_pca(const std::vector<std::vector<double>>& patches);

/// Sum of squared residuals after projecting onto the first k axes.
double reconstruction_error(const std::vector<std::vector<double>>& patches, const PcaModel& model, std::size_t k);

struct PcaRow {
  std::string domain;
  double pc1 = 0.0;
  double pc2 = 0.0;
};

std::vector<PcaRow> pca_patches(std::span<const Image> images, std::span<const PatchSite> sites);
void write_pca_csv(const std::filesystem::path& path, std::span<const PcaRow> rows);

}  // namespace scatterfield
