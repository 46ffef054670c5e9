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
#include <vector>

#include "scatterfield/grid.hpp"

namespace scatterfield {

inline constexpr std::size_t kViewCount = 9;
inline constexpr double kSensorPixelPitchUm = 2.4;
inline constexpr double kMagnification = 0.52;

/// Top-left corner and size of a view crop in sensor pixels.
struct CropRect {
  long row = 0;
  long col = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;

  friend bool operator==(const CropRect&, const CropRect&) = default;
};

/// 3x3 lenslet view layout. Views are indexed row-major, i = 3 * lattice_row + lattice_col;
/// view 4 is the central, zero-baseline view. A view centre is the sensor pixel that
/// lands on index (view_size/2, view_size/2) of its crop.
struct ViewGeometry {
  Shape2 sensor;
  std::size_t view_size = 512;
  std::array<std::array<double, 2>, kViewCount> centers{};         // (row, col) pixels
  std::array<std::array<double, 2>, kViewCount> baseline_dirs{};   // (row, col), unit or zero
  double parallax_px_per_um = 0.05;
  double z_focus_um = 0.0;

  CropRect crop(std::size_t view) const;
  /// Lateral displacement (row, col) in pixels of view `view` at depth z.
  std::array<double, 2> parallax_shift(std::size_t view, double z_um) const noexcept;
  /// Throws Error(geometry) unless centres form a 3x3 lattice whose crops are
  /// integral, disjoint and inside the sensor.
  void validate() const;

  friend bool operator==(const ViewGeometry&, const ViewGeometry&) = default;
};

/// Uniform 3x3 lattice centred on the sensor with spacing floor(dim/3) per axis.
/// Unit baselines point from the central view towards each outer view.
ViewGeometry default_view_geometry(Shape2 sensor, std::size_t view_size = 512);

struct SyntheticPsfParams {
  double sigma0_um = 2.7;        // in-focus blur, measured on the sensor
  double beta = 0.026;           // blur growth per um of defocus
  double parallax_px_per_um = 0.05;
  double z_focus_um = 0.0;
  double truncate_sigmas = 5.0;  // spot support radius in units of sigma

  void validate() const;
  /// Spot standard deviation in sensor pixels at depth z.
  double sigma_px(double z_um) const noexcept;

  friend bool operator==(const SyntheticPsfParams&, const SyntheticPsfParams&) = default;
};

/// Sensor-shaped kernels, one per depth. The kernel origin (zero lateral offset)
/// is pixel (rows/2, cols/2).
struct PsfStack {
  std::vector<Image> kernels;
  std::vector<double> z_planes_um;
  double pixel_pitch_um = kSensorPixelPitchUm;
  double magnification = kMagnification;

  std::size_t planes() const noexcept { return kernels.size(); }
  Shape2 kernel_shape() const noexcept { return kernels.empty() ? Shape2{} : kernels.front().shape(); }
  /// Throws unless kernels are non-negative with positive sums, share a shape,
  /// and the z grid is strictly increasing with uniform pitch.
  void validate() const;
};

/// Reads a stack file with axes "z,y,x" and rescales each plane to unit sum.
/// expected_planes = 0 skips the plane-count check.
PsfStack load_psf_stack(const std::filesystem::path& path, std::size_t expected_planes = 0);
void save_psf_stack(const std::filesystem::path& path, const PsfStack& psf);

/// Nine Gaussian spots per plane, spot i at centers[i] + parallax_shift(i, z),
/// each truncated to `truncate_sigmas` and renormalised to carry exactly 1/9.
PsfStack synthesize_psf_stack(const SyntheticPsfParams& params, const ViewGeometry& geometry,
                              const std::vector<double>& z_planes_um);

/// Geometry with the parallax settings of the given PSF parameters.
ViewGeometry with_parallax(ViewGeometry geometry, const SyntheticPsfParams& params);

}  // namespace scatterfield
