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

#include "scatterfield/volume_synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "scatterfield/error.hpp"
#include "scatterfield/kernels.hpp"
#include "scatterfield/rng.hpp"

namespace scatterfield {

std::vector<double> GridSpec::plane_z_values() const {
  std::vector<double> z(planes);
  for (std::size_t k = 0; k < planes; ++k) z[k] = z_of_plane(static_cast<double>(k));
  return z;
}

void VolumeRecipe::validate() const {
  require(grid.planes > 0 && grid.rows > 0 && grid.cols > 0, ErrorKind::invalid_recipe,
          "volume recipe: zero-volume grid");
  require(grid.pitch_xy_um > 0.0 && grid.pitch_z_um > 0.0, ErrorKind::invalid_recipe,
          "volume recipe: voxel pitch must be positive");
  require(density_mean_per_mm3 > 0.0 && density_std_per_mm3 >= 0.0, ErrorKind::invalid_recipe,
          "volume recipe: density mean must be > 0 and std >= 0");
  require(diameter_mean_um > 0.0 && diameter_std_um >= 0.0, ErrorKind::invalid_recipe,
          "volume recipe: diameter mean must be > 0 and std >= 0");
  require(brightness_mean > 0.0 && brightness_std >= 0.0, ErrorKind::invalid_recipe,
          "volume recipe: brightness mean must be > 0 and std >= 0");
  require(fov_diameter_um > 0.0 && fov_diameter_um <= 2000.0, ErrorKind::invalid_recipe,
          "volume recipe: FOV diameter must lie in (0, 2000] um");
  require(diameter_mean_um < effective_fov_diameter_um() &&
              diameter_mean_um < grid.pitch_z_um * static_cast<double>(grid.planes),
          ErrorKind::invalid_recipe, "volume recipe: beads do not fit inside the grid");
}

double VolumeRecipe::effective_fov_diameter_um() const noexcept {
  // Largest circle about the optical axis that stays on the grid.
  const double lateral = 2.0 * std::min({-grid.x_min_um(), grid.x_max_um(), -grid.y_min_um(), grid.y_max_um()});
  return std::min(fov_diameter_um, lateral);
}

double VolumeRecipe::placement_volume_mm3() const noexcept {
  const double radius_mm = 0.5 * effective_fov_diameter_um() * 1e-3;
  const double height_mm = (grid.z_max_um() - grid.z_min_um()) * 1e-3;
  return std::numbers::pi * radius_mm * radius_mm * height_mm;
}

std::vector<Emitter> sample_emitters(const VolumeRecipe& recipe) {
  recipe.validate();
  Engine engine(recipe.seed);
  std::normal_distribution<double> density(recipe.density_mean_per_mm3, recipe.density_std_per_mm3);
  std::normal_distribution<double> diameter(recipe.diameter_mean_um, recipe.diameter_std_um);
  std::normal_distribution<double> brightness(recipe.brightness_mean, recipe.brightness_std);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const double rho = std::max(0.0, recipe.density_std_per_mm3 > 0.0 ? density(engine)
                                                                     : recipe.density_mean_per_mm3);
  const auto count = static_cast<std::size_t>(std::llround(rho * recipe.placement_volume_mm3()));

  const double fov_radius = 0.5 * recipe.effective_fov_diameter_um();
  const double z_lo = recipe.grid.z_min_um();
  const double z_hi = recipe.grid.z_max_um();
  // Keep every sphere inside the placement cylinder so its footprint stays on the grid.
  const double max_diameter = std::min(2.0 * fov_radius, z_hi - z_lo);

  std::vector<Emitter> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Emitter e;
    do {
      e.diameter_um = recipe.diameter_std_um > 0.0 ? diameter(engine) : recipe.diameter_mean_um;
    } while (e.diameter_um < 1.0 || e.diameter_um >= max_diameter);
    do {
      e.brightness = recipe.brightness_std > 0.0 ? brightness(engine) : recipe.brightness_mean;
    } while (e.brightness <= 0.0);
    e.brightness = std::min(e.brightness, 1.0);

    const double r = 0.5 * e.diameter_um;
    const double lateral = (fov_radius - r) * std::sqrt(unit(engine));
    const double theta = 2.0 * std::numbers::pi * unit(engine);
    e.x_um = lateral * std::cos(theta);
    e.y_um = lateral * std::sin(theta);
    e.z_um = z_lo + r + (z_hi - z_lo - 2.0 * r) * unit(engine);
    out.push_back(e);
  }
  return out;
}

void check_emitters_inside(std::span<const Emitter> emitters, const GridSpec& grid) {
  for (std::size_t i = 0; i < emitters.size(); ++i) {
    const Emitter& e = emitters[i];
    const double r = 0.5 * e.diameter_um;
    const bool inside = e.diameter_um > 0.0 && e.x_um - r >= grid.x_min_um() && e.x_um + r <= grid.x_max_um() &&
                        e.y_um - r >= grid.y_min_um() && e.y_um + r <= grid.y_max_um() &&
                        e.z_um - r >= grid.z_min_um() && e.z_um + r <= grid.z_max_um();
    if (!inside) {
      std::ostringstream msg;
      msg << "rasterize: emitter " << i << " at (" << e.x_um << ", " << e.y_um << ", " << e.z_um
          << ") um with diameter " << e.diameter_um << " um is outside the grid";
      fail(ErrorKind::invalid_argument, msg.str());
    }
    require(e.brightness > 0.0 && e.brightness <= 1.0, ErrorKind::invalid_argument,
            "rasterize: emitter " + std::to_string(i) + " brightness outside (0, 1]");
  }
}

Volume rasterize(std::span<const Emitter> emitters, const GridSpec& grid) {
  check_emitters_inside(emitters, grid);
  Volume v;
  v.grid = grid;
  v.data = Grid3(grid.planes, grid.rows, grid.cols);
  v.emitters.assign(emitters.begin(), emitters.end());
  kernels::rasterize_spheres(emitters, grid, v.data);
  return v;
}

Volume synthesize_volume(const VolumeRecipe& recipe) {
  const std::vector<Emitter> emitters = sample_emitters(recipe);
  return rasterize(emitters, recipe.grid);
}

void write_emitters_csv(const std::filesystem::path& path, std::span<const Emitter> emitters) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::io, "cannot open " + path.string() + " for writing");
  out << "x_um,y_um,z_um,diameter_um,brightness\n";
  out << std::setprecision(17);
  for (const Emitter& e : emitters)
    out << e.x_um << ',' << e.y_um << ',' << e.z_um << ',' << e.diameter_um << ',' << e.brightness << '\n';
  require(static_cast<bool>(out), ErrorKind::io, "write failed: " + path.string());
}

std::vector<Emitter> read_emitters_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "x_um,y_um,z_um,diameter_um,brightness", ErrorKind::format,
          path.string() + ": unexpected emitter CSV header");
  std::vector<Emitter> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::istringstream fields(line);
    Emitter e;
    char sep = 0;
    fields >> e.x_um >> sep >> e.y_um >> sep >> e.z_um >> sep >> e.diameter_um >> sep >> e.brightness;
    require(static_cast<bool>(fields), ErrorKind::format,
            path.string() + ": malformed row at line " + std::to_string(line_no));
    out.push_back(e);
  }
  return out;
}

}  // namespace scatterfield
