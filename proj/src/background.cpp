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

#include <cmath>
#include <random>

#include "scatterfield/error.hpp"
#include "scatterfield/scatter_sim.hpp"

namespace scatterfield {

void BackgroundParams::validate() const {
  require(lattice_pitch_px > 0.0, ErrorKind::invalid_argument, "background: lattice pitch must be positive");
  require(blur_sigma_min_um > 0.0 && blur_sigma_min_um <= blur_sigma_max_um, ErrorKind::invalid_argument,
          "background: blur sigma range must be positive and ordered");
  require(static_cast<double>(canvas_size) >= lattice_pitch_px, ErrorKind::invalid_argument,
          "background: canvas smaller than one lattice cell");
  require(envelope_sigma_um >= 0.0, ErrorKind::invalid_argument, "background: envelope sigma must be >= 0");
  require(object_pitch_um > 0.0, ErrorKind::invalid_argument, "background: object pitch must be positive");
}

double BackgroundParams::envelope_sigma_px(std::size_t view_size) const noexcept {
  if (envelope_sigma_um > 0.0) return envelope_sigma_um / object_pitch_um;
  return static_cast<double>(view_size) / 4.0;
}

Image interpolate_lattice(const Image& lattice, std::size_t canvas_size, double pitch) {
  require(!lattice.empty() && pitch > 0.0, ErrorKind::invalid_argument, "interpolate_lattice: bad lattice");
  const double span = static_cast<double>(canvas_size - 1) / pitch;
  require(span <= static_cast<double>(lattice.rows() - 1) && span <= static_cast<double>(lattice.cols() - 1),
          ErrorKind::invalid_argument, "interpolate_lattice: lattice does not cover the canvas");
  Image canvas(canvas_size, canvas_size);
  for (std::size_t r = 0; r < canvas_size; ++r)
    for (std::size_t c = 0; c < canvas_size; ++c) {
      double v = 0.0;
      kernels::sample_bilinear(lattice, static_cast<double>(r) / pitch, static_cast<double>(c) / pitch, v);
      canvas(r, c) = v;
    }
  return canvas;
}

Image value_noise(std::size_t canvas_size, double pitch, Engine& engine) {
  const auto nodes = static_cast<std::size_t>(std::ceil(static_cast<double>(canvas_size - 1) / pitch)) + 1;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Image lattice(std::max<std::size_t>(nodes, 2), std::max<std::size_t>(nodes, 2));
  for (double& v : lattice.values()) v = unit(engine);
  return interpolate_lattice(lattice, canvas_size, pitch);
}

Image blurred_canvas(const BackgroundParams& params, std::size_t view_size, double sigma_um, Engine& engine) {
  const Image canvas = value_noise(params.canvas_size, params.lattice_pitch_px, engine);
  const Image resized = kernels::resize_bilinear(canvas, {view_size, view_size});
  return kernels::gaussian_blur(resized, sigma_um / params.object_pitch_um);
}

Background place_background(std::span<const Image> canvases, const BackgroundParams& params,
                            const ViewGeometry& geometry) {
  const std::size_t vs = geometry.view_size;
  require(canvases.size() == 1 || canvases.size() == kViewCount, ErrorKind::invalid_argument,
          "background: need one shared canvas or one per view");
  for (const Image& c : canvases)
    require(c.shape() == Shape2{vs, vs}, ErrorKind::shape_mismatch, "background: canvas is not view sized");

  double total = 0.0;
  for (const Image& c : canvases) total += mean_value(c.values());
  const double raw_bar = total / static_cast<double>(canvases.size());

  const double sigma = params.envelope_sigma_px(vs);
  const double half = static_cast<double>(vs / 2);
  std::vector<double> envelope(vs * vs);
  for (std::size_t r = 0; r < vs; ++r)
    for (std::size_t c = 0; c < vs; ++c) {
      const double dr = static_cast<double>(r) - half;
      const double dc = static_cast<double>(c) - half;
      envelope[r * vs + c] = std::exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma));
    }

  Background bg;
  bg.image = Image(geometry.sensor);
  for (std::size_t i = 0; i < kViewCount; ++i) {
    const Image& canvas = canvases[canvases.size() == 1 ? 0 : i];
    const CropRect crop = geometry.crop(i);
    for (std::size_t r = 0; r < vs; ++r)
      for (std::size_t c = 0; c < vs; ++c)
        bg.image(static_cast<std::size_t>(crop.row) + r, static_cast<std::size_t>(crop.col) + c) =
            canvas(r, c) * envelope[r * vs + c];
  }
  bg.normalization = normalize_by_max(bg.image.values());
  require(bg.normalization > 0.0, ErrorKind::data, "background: all-zero canvas");
  bg.bg_bar = raw_bar / bg.normalization;
  return bg;
}

Background generate_background(const BackgroundParams& params, const ViewGeometry& geometry) {
  params.validate();
  geometry.validate();
  Engine engine(params.seed);
  std::uniform_real_distribution<double> sigma_draw(params.blur_sigma_min_um, params.blur_sigma_max_um);
  const double sigma_um = sigma_draw(engine);
  const std::size_t count = params.shared ? 1 : kViewCount;
  std::vector<Image> canvases(count);
  // Each canvas owns a stream so the result does not depend on evaluation order.
  const long n = static_cast<long>(count);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    Engine view_engine(derive_seed(params.seed, {static_cast<std::uint64_t>(i)}));
    canvases[static_cast<std::size_t>(i)] = blurred_canvas(params, geometry.view_size, sigma_um, view_engine);
  }
  Background bg = place_background(canvases, params, geometry);
  bg.blur_sigma_um = sigma_um;
  return bg;
}

}  // namespace scatterfield
