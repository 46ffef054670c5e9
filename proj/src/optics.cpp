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

#include "scatterfield/optics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "scatterfield/dataset_io.hpp"
#include "scatterfield/error.hpp"

namespace scatterfield {

CropRect ViewGeometry::crop(std::size_t view) const {
  const long half = static_cast<long>(view_size / 2);
  return {std::lround(centers[view][0]) - half, std::lround(centers[view][1]) - half, view_size, view_size};
}

std::array<double, 2> ViewGeometry::parallax_shift(std::size_t view, double z_um) const noexcept {
  const double d = parallax_px_per_um * (z_um - z_focus_um);
  return {d * baseline_dirs[view][0], d * baseline_dirs[view][1]};
}

void ViewGeometry::validate() const {
  require(view_size > 0, ErrorKind::geometry, "view geometry: view_size must be positive");
  for (std::size_t i = 0; i < kViewCount; ++i) {
    for (double c : centers[i])
      require(c == std::round(c), ErrorKind::geometry, "view geometry: view centres must be integral pixels");
    const double norm = std::hypot(baseline_dirs[i][0], baseline_dirs[i][1]);
    require(i == 4 ? norm == 0.0 : std::abs(norm - 1.0) < 1e-9, ErrorKind::geometry,
            "view geometry: baseline of view " + std::to_string(i) + " must be a unit vector (zero only for view 4)");
  }
  // Rectangular lattice: rows shared along lattice rows, columns along lattice columns.
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) {
      require(centers[3 * a + b][0] == centers[3 * a][0] && centers[3 * a + b][1] == centers[b][1],
              ErrorKind::geometry, "view geometry: centres do not form a 3x3 lattice");
    }
  const double dr = centers[3][0] - centers[0][0];
  const double dc = centers[1][1] - centers[0][1];
  require(centers[6][0] - centers[3][0] == dr && centers[2][1] - centers[1][1] == dc, ErrorKind::geometry,
          "view geometry: lattice spacing is not uniform");
  const double vs = static_cast<double>(view_size);
  require(dr >= vs && dc >= vs, ErrorKind::geometry, "view geometry: view crops overlap");
  for (std::size_t i = 0; i < kViewCount; ++i) {
    const CropRect r = crop(i);
    require(r.row >= 0 && r.col >= 0 && r.row + static_cast<long>(r.rows) <= static_cast<long>(sensor.rows) &&
                r.col + static_cast<long>(r.cols) <= static_cast<long>(sensor.cols),
            ErrorKind::geometry, "view geometry: crop of view " + std::to_string(i) + " leaves the sensor");
  }
}

ViewGeometry default_view_geometry(Shape2 sensor, std::size_t view_size) {
  if (view_size == 0 || sensor.rows < 3 * view_size || sensor.cols < 3 * view_size) {
    std::ostringstream msg;
    msg << "sensor " << sensor.rows << "x" << sensor.cols << " is smaller than 3 x view_size (" << view_size
        << ") per axis";
    fail(ErrorKind::geometry, msg.str());
  }
  ViewGeometry g;
  g.sensor = sensor;
  g.view_size = view_size;
  const double step_r = static_cast<double>(sensor.rows / 3);
  const double step_c = static_cast<double>(sensor.cols / 3);
  const double mid_r = static_cast<double>(sensor.rows / 2);
  const double mid_c = static_cast<double>(sensor.cols / 2);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) {
      const double lr = static_cast<double>(a) - 1.0;
      const double lc = static_cast<double>(b) - 1.0;
      const std::size_t i = 3 * a + b;
      g.centers[i] = {mid_r + lr * step_r, mid_c + lc * step_c};
      const double norm = std::hypot(lr, lc);
      g.baseline_dirs[i] = norm > 0.0 ? std::array<double, 2>{lr / norm, lc / norm} : std::array<double, 2>{0.0, 0.0};
    }
  g.validate();
  return g;
}

ViewGeometry with_parallax(ViewGeometry geometry, const SyntheticPsfParams& params) {
  geometry.parallax_px_per_um = params.parallax_px_per_um;
  geometry.z_focus_um = params.z_focus_um;
  return geometry;
}

void SyntheticPsfParams::validate() const {
  require(sigma0_um > 0.0, ErrorKind::invalid_argument, "synthetic PSF: sigma0 must be positive");
  require(beta >= 0.0, ErrorKind::invalid_argument, "synthetic PSF: beta must be non-negative");
  require(std::isfinite(parallax_px_per_um), ErrorKind::invalid_argument, "synthetic PSF: parallax must be finite");
  require(truncate_sigmas >= 3.0, ErrorKind::invalid_argument, "synthetic PSF: truncation must be >= 3 sigma");
}

double SyntheticPsfParams::sigma_px(double z_um) const noexcept {
  const double defocus = beta * (z_um - z_focus_um);
  return std::sqrt(sigma0_um * sigma0_um + defocus * defocus) / kSensorPixelPitchUm;
}

void PsfStack::validate() const {
  require(!kernels.empty(), ErrorKind::format, "PSF stack has no planes");
  require(kernels.size() == z_planes_um.size(), ErrorKind::format, "PSF stack: one z value per kernel required");
  const Shape2 shape = kernels.front().shape();
  for (std::size_t k = 0; k < kernels.size(); ++k) {
    require(kernels[k].shape() == shape, ErrorKind::format, "PSF stack: kernels differ in shape");
    double total = 0.0;
    for (double v : kernels[k].values()) {
      require(v >= 0.0, ErrorKind::format, "PSF stack: negative value in plane " + std::to_string(k));
      total += v;
    }
    require(total > 0.0, ErrorKind::format, "PSF stack: plane " + std::to_string(k) + " sums to zero");
  }
  for (std::size_t k = 1; k < z_planes_um.size(); ++k) {
    require(z_planes_um[k] > z_planes_um[k - 1], ErrorKind::format, "PSF stack: z planes not strictly increasing");
    const double pitch = z_planes_um[1] - z_planes_um[0];
    require(std::abs(z_planes_um[k] - z_planes_um[k - 1] - pitch) <= 1e-9 * std::max(1.0, pitch),
            ErrorKind::format, "PSF stack: z pitch is not uniform");
  }
}

PsfStack load_psf_stack(const std::filesystem::path& path, std::size_t expected_planes) {
  const Stack stack = read_stack(path);
  require(stack.header.axes == "z,y,x", ErrorKind::format,
          path.string() + ": PSF stack needs axes z,y,x, found " + stack.header.axes);
  const std::size_t planes = stack.header.shape[0];
  if (expected_planes != 0 && planes != expected_planes)
    fail(ErrorKind::shape_mismatch, path.string() + ": PSF stack has " + std::to_string(planes) +
                                        " planes, volume has " + std::to_string(expected_planes));
  const Grid3 grid = grid_from_stack(stack);
  PsfStack psf;
  if (stack.header.pixel_pitch_um > 0.0) psf.pixel_pitch_um = stack.header.pixel_pitch_um;
  if (stack.header.meta.contains("magnification")) psf.magnification = stack.header.meta["magnification"].get<double>();
  for (std::size_t k = 0; k < planes; ++k) {
    Image kernel = grid.plane_image(k);
    double total = 0.0;
    for (double v : kernel.values()) {
      if (!(v >= 0.0)) fail(ErrorKind::format, path.string() + ": negative value in PSF plane " + std::to_string(k));
      total += v;
    }
    require(total > 0.0, ErrorKind::format, path.string() + ": PSF plane " + std::to_string(k) + " sums to zero");
    for (double& v : kernel.values()) v /= total;
    psf.kernels.push_back(std::move(kernel));
    psf.z_planes_um.push_back(stack.header.z0_um + static_cast<double>(k) * stack.header.dz_um);
  }
  psf.validate();
  return psf;
}

void save_psf_stack(const std::filesystem::path& path, const PsfStack& psf) {
  psf.validate();
  const Shape2 shape = psf.kernel_shape();
  Grid3 grid(psf.planes(), shape.rows, shape.cols);
  for (std::size_t k = 0; k < psf.planes(); ++k)
    std::copy(psf.kernels[k].values().begin(), psf.kernels[k].values().end(), grid.plane(k).begin());
  const double dz = psf.planes() > 1 ? psf.z_planes_um[1] - psf.z_planes_um[0] : 0.0;
  Json meta = {{"kind", "psf"}, {"magnification", psf.magnification}};
  write_stack(path, stack_from_grid(grid, "z,y,x", psf.pixel_pitch_um, psf.z_planes_um.front(), dz, meta));
}

PsfStack synthesize_psf_stack(const SyntheticPsfParams& params, const ViewGeometry& geometry,
                              const std::vector<double>& z_planes_um) {
  params.validate();
  geometry.validate();
  require(!z_planes_um.empty(), ErrorKind::invalid_argument, "synthetic PSF: no z planes");
  const ViewGeometry g = with_parallax(geometry, params);
  const double max_r = static_cast<double>(g.sensor.rows) - 1.0;
  const double max_c = static_cast<double>(g.sensor.cols) - 1.0;

  std::ostringstream escaped;
  for (double z : z_planes_um) {
    const double radius = params.truncate_sigmas * params.sigma_px(z);
    for (std::size_t i = 0; i < kViewCount; ++i) {
      const auto s = g.parallax_shift(i, z);
      const double cr = g.centers[i][0] + s[0];
      const double cc = g.centers[i][1] + s[1];
      if (cr - radius < 0.0 || cr + radius > max_r || cc - radius < 0.0 || cc + radius > max_c)
        escaped << " (view " << i << ", z " << z << " um)";
    }
  }
  if (!escaped.str().empty()) fail(ErrorKind::geometry, "synthetic PSF: spots leave the sensor at" + escaped.str());

  PsfStack psf;
  psf.z_planes_um = z_planes_um;
  psf.kernels.assign(z_planes_um.size(), Image(g.sensor));
  const long n = static_cast<long>(z_planes_um.size());

#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < n; ++k) {
    const double z = z_planes_um[static_cast<std::size_t>(k)];
    const double sigma = params.sigma_px(z);
    const double radius = params.truncate_sigmas * sigma;
    Image& kernel = psf.kernels[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < kViewCount; ++i) {
      const auto s = g.parallax_shift(i, z);
      const double cr = g.centers[i][0] + s[0];
      const double cc = g.centers[i][1] + s[1];
      const long r0 = static_cast<long>(std::ceil(cr - radius));
      const long r1 = static_cast<long>(std::floor(cr + radius));
      const long c0 = static_cast<long>(std::ceil(cc - radius));
      const long c1 = static_cast<long>(std::floor(cc + radius));
      Image spot(static_cast<std::size_t>(r1 - r0 + 1), static_cast<std::size_t>(c1 - c0 + 1));
      double total = 0.0;
      for (long r = r0; r <= r1; ++r)
        for (long c = c0; c <= c1; ++c) {
          const double d2 = (r - cr) * (r - cr) + (c - cc) * (c - cc);
          if (d2 > radius * radius) continue;
          const double v = std::exp(-0.5 * d2 / (sigma * sigma));
          spot(static_cast<std::size_t>(r - r0), static_cast<std::size_t>(c - c0)) = v;
          total += v;
        }
      const double scale = 1.0 / (static_cast<double>(kViewCount) * total);
      for (long r = r0; r <= r1; ++r)
        for (long c = c0; c <= c1; ++c)
          kernel(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) +=
              scale * spot(static_cast<std::size_t>(r - r0), static_cast<std::size_t>(c - c0));
    }
  }
  return psf;
}

}  // namespace scatterfield
