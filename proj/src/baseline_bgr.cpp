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

#include "scatterfield/baseline_bgr.hpp"

#include <algorithm>

#include "scatterfield/error.hpp"
#include "scatterfield/kernels.hpp"
#include "scatterfield/lightfield.hpp"

namespace scatterfield {

std::string to_string(BgrMode mode) {
  return mode == BgrMode::morphological_open ? "morphological_open" : "gaussian_highpass";
}

BgrMode bgr_mode_from_string(const std::string& s) {
  if (s == "morphological_open" || s == "open") return BgrMode::morphological_open;
  if (s == "gaussian_highpass" || s == "highpass") return BgrMode::gaussian_highpass;
  fail(ErrorKind::invalid_argument, "unknown background-removal mode \"" + s + "\"");
}

void BgrParams::validate() const {
  require(structuring_radius >= 1, ErrorKind::invalid_argument, "background removal: radius must be >= 1");
}

Image opening(const Image& img, int radius) {
  return kernels::dilate_disk(kernels::erode_disk(img, radius), radius);
}

Image remove_background(const Image& m, const BgrParams& params) {
  params.validate();
  const Image estimate = params.mode == BgrMode::morphological_open
                             ? opening(m, params.structuring_radius)
                             : kernels::gaussian_blur(m, static_cast<double>(params.structuring_radius));
  Image out(m.shape());
  auto src = m.values();
  auto est = estimate.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::max(0.0, src[i] - est[i]);
  return out;
}

Grid3 baseline_predict(const Image& measurement, const ViewGeometry& geometry,
                       const std::vector<double>& z_planes_um, const BaselinePredictorConfig& config) {
  require(config.relative_floor >= 0.0 && config.relative_floor < 1.0, ErrorKind::invalid_argument,
          "baseline: relative floor must lie in [0, 1)");
  const Image cleaned = remove_background(measurement, config.bgr);
  RefocusedVolume volume = refocus(extract_views(cleaned, geometry), z_planes_um);
  normalize_by_max(volume.planes.values());
  for (double& v : volume.planes.values())
    if (v < config.relative_floor) v = 0.0;
  return std::move(volume.planes);
}

}  // namespace scatterfield
