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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "scatterfield/grid.hpp"

namespace scatterfield {

/// Spherical fluorescent bead. Coordinates are object-space micrometres with
/// the lateral origin on the optical axis (volume centre column/row).
struct Emitter {
  double x_um = 0.0;
  double y_um = 0.0;
  double z_um = 0.0;
  double diameter_um = 0.0;
  double brightness = 0.0;

  friend bool operator==(const Emitter&, const Emitter&) = default;
};

/// Coarse reconstruction grid. Voxel (k, r, c) is centred at
/// x = (c - cols/2) * pitch_xy, y = (r - rows/2) * pitch_xy, z = z0 + k * pitch_z.
struct GridSpec {
  std::size_t planes = 24;
  std::size_t rows = 512;
  std::size_t cols = 512;
  double pitch_xy_um = 4.15;
  double pitch_z_um = 25.0;
  double z0_um = -200.0;

  double x_of_col(double c) const noexcept { return (c - static_cast<double>(cols / 2)) * pitch_xy_um; }
  double y_of_row(double r) const noexcept { return (r - static_cast<double>(rows / 2)) * pitch_xy_um; }
  double z_of_plane(double k) const noexcept { return z0_um + k * pitch_z_um; }
  double col_of_x(double x) const noexcept { return x / pitch_xy_um + static_cast<double>(cols / 2); }
  double row_of_y(double y) const noexcept { return y / pitch_xy_um + static_cast<double>(rows / 2); }
  double plane_of_z(double z) const noexcept { return (z - z0_um) / pitch_z_um; }

  /// Slab bounds of the whole grid (voxel edges, not centres).
  double x_min_um() const noexcept { return x_of_col(-0.5); }
  double x_max_um() const noexcept { return x_of_col(static_cast<double>(cols) - 0.5); }
  double y_min_um() const noexcept { return y_of_row(-0.5); }
  double y_max_um() const noexcept { return y_of_row(static_cast<double>(rows) - 0.5); }
  double z_min_um() const noexcept { return z_of_plane(-0.5); }
  double z_max_um() const noexcept { return z_of_plane(static_cast<double>(planes) - 0.5); }

  std::vector<double> plane_z_values() const;
  std::size_t voxel_count() const noexcept { return planes * rows * cols; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Fine rasterisation grid subdivision per coarse voxel along each axis.
inline constexpr std::size_t kFineFactor = 5;

struct VolumeRecipe {
  std::uint64_t seed = 0;
  double density_mean_per_mm3 = 180.0;
  double density_std_per_mm3 = 118.0;
  double diameter_mean_um = 15.0;
  double diameter_std_um = 2.0;
  double brightness_mean = 0.8;
  double brightness_std = 0.1;
  GridSpec grid;
  double fov_diameter_um = 2000.0;

  void validate() const;
  /// Lateral diameter actually used for placement: the configured FOV clipped
  /// to the grid's inscribed circle.
  double effective_fov_diameter_um() const noexcept;
  /// Volume of the placement cylinder in mm^3.
  double placement_volume_mm3() const noexcept;
};

struct Volume {
  GridSpec grid;
  Grid3 data;
  std::vector<Emitter> emitters;
};

std::vector<Emitter> sample_emitters(const VolumeRecipe& recipe);

/// Renders each emitter as a solid sphere on the 5x finer grid (overlaps
/// combine by max) and mean-pools 5x5x5 onto the coarse grid. Along z the fine
/// voxel takes the exact fraction of its 5-sample slab covered by the sphere
/// chord; laterally inclusion is sampled at fine voxel centres.
Volume rasterize(std::span<const Emitter> emitters, const GridSpec& grid);

/// sample_emitters followed by rasterize.
Volume synthesize_volume(const VolumeRecipe& recipe);

/// Throws Error(invalid_argument) naming the first emitter whose sphere
/// escapes the grid.
void check_emitters_inside(std::span<const Emitter> emitters, const GridSpec& grid);

void write_emitters_csv(const std::filesystem::path& path, std::span<const Emitter> emitters);
std::vector<Emitter> read_emitters_csv(const std::filesystem::path& path);

}  // namespace scatterfield
