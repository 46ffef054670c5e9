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
#include <cstdint>
#include <vector>

#include "scatterfield/kernels.hpp"

namespace scatterfield::kernels {
namespace {

struct SphereGeom {
  double cx, cy, cz, r2, r, brightness;
};

// Fraction of the axial slab [zc - half, zc + half] covered by the chord of
// the sphere at lateral squared distance rho2, scaled by brightness.
inline double fine_value(const SphereGeom& s, double xf, double yf, double zc, double half) noexcept {
  const double dx = xf - s.cx;
  const double dy = yf - s.cy;
  const double rho2 = dx * dx + dy * dy;
  if (rho2 > s.r2) return 0.0;
  const double h = std::sqrt(s.r2 - rho2);
  const double lo = std::max(zc - half, s.cz - h);
  const double hi = std::min(zc + half, s.cz + h);
  if (hi <= lo) return 0.0;
  return s.brightness * (hi - lo) / (2.0 * half);
}

inline long voxel_index(double continuous) noexcept {
  return static_cast<long>(std::floor(continuous + 0.5));
}

}  // namespace

void rasterize_spheres(std::span<const Emitter> emitters, const GridSpec& grid, Grid3& out) {
  const long planes = static_cast<long>(grid.planes);
  const long rows = static_cast<long>(grid.rows);
  const long cols = static_cast<long>(grid.cols);
  std::fill(out.values().begin(), out.values().end(), 0.0);
  if (emitters.empty()) return;

  std::vector<SphereGeom> spheres;
  spheres.reserve(emitters.size());
  for (const Emitter& e : emitters) {
    const double r = 0.5 * e.diameter_um;
    spheres.push_back({e.x_um, e.y_um, e.z_um, r * r, r, e.brightness});
  }

  const double fine_xy = grid.pitch_xy_um / static_cast<double>(kFineFactor);
  const double fine_z = grid.pitch_z_um / static_cast<double>(kFineFactor);
  const double half_z = 0.5 * fine_z;
  constexpr long F = static_cast<long>(kFineFactor);
  constexpr double inv_count = 1.0 / static_cast<double>(kFineFactor * kFineFactor * kFineFactor);

#pragma omp parallel
  {
    std::vector<std::vector<std::uint32_t>> cells(static_cast<std::size_t>(rows * cols));
    std::vector<std::size_t> touched;

#pragma omp for schedule(dynamic, 1)
    for (long k = 0; k < planes; ++k) {
      const double zk = grid.z_of_plane(static_cast<double>(k));
      touched.clear();
      for (std::size_t i = 0; i < spheres.size(); ++i) {
        const SphereGeom& s = spheres[i];
        if (std::abs(s.cz - zk) >= s.r + 0.5 * grid.pitch_z_um) continue;
        const long c0 = std::max(0L, voxel_index(grid.col_of_x(s.cx - s.r)));
        const long c1 = std::min(cols - 1, voxel_index(grid.col_of_x(s.cx + s.r)));
        const long r0 = std::max(0L, voxel_index(grid.row_of_y(s.cy - s.r)));
        const long r1 = std::min(rows - 1, voxel_index(grid.row_of_y(s.cy + s.r)));
        for (long r = r0; r <= r1; ++r) {
          for (long c = c0; c <= c1; ++c) {
            auto& cell = cells[static_cast<std::size_t>(r * cols + c)];
            if (cell.empty()) touched.push_back(static_cast<std::size_t>(r * cols + c));
            cell.push_back(static_cast<std::uint32_t>(i));
          }
        }
      }

      std::sort(touched.begin(), touched.end());
      auto plane = out.plane(static_cast<std::size_t>(k));
      for (std::size_t idx : touched) {
        auto& cell = cells[idx];
        const long r = static_cast<long>(idx) / cols;
        const long c = static_cast<long>(idx) % cols;
        const double xc = grid.x_of_col(static_cast<double>(c));
        const double yc = grid.y_of_row(static_cast<double>(r));
        double total = 0.0;
        for (long a = 0; a < F; ++a) {
          const double zf = zk + static_cast<double>(a - F / 2) * fine_z;
          for (long b = 0; b < F; ++b) {
            const double yf = yc + static_cast<double>(b - F / 2) * fine_xy;
            for (long e = 0; e < F; ++e) {
              const double xf = xc + static_cast<double>(e - F / 2) * fine_xy;
              double v = 0.0;
              for (std::uint32_t i : cell) v = std::max(v, fine_value(spheres[i], xf, yf, zf, half_z));
              total += v;
            }
          }
        }
        plane[idx] = total * inv_count;
        cell.clear();
      }
    }
  }
}

}  // namespace scatterfield::kernels
