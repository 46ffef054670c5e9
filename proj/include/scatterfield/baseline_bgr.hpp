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

#include <string>
#include <vector>

#include "scatterfield/grid.hpp"
#include "scatterfield/optics.hpp"

namespace scatterfield {

enum class BgrMode { morphological_open, gaussian_highpass };

std::string to_string(BgrMode mode);
BgrMode bgr_mode_from_string(const std::string& s);

struct BgrParams {
  int structuring_radius = 15;  // pixels
  BgrMode mode = BgrMode::morphological_open;

  void validate() const;
};

/// Grey-scale opening (erosion then dilation) with a flat disk.
Image opening(const Image& img, int radius);

/// morphological_open: m - opening(m); gaussian_highpass: m - blur(m, radius);
/// both clamped at 0.
Image remove_background(const Image& m, const BgrParams& params);

/// Non-learned reconstruction: background removal, view extraction, refocusing,
/// max-normalisation, then voxels below `relative_floor` are zeroed.
struct BaselinePredictorConfig {
  BgrParams bgr;
  double relative_floor = 0.5;
};

Grid3 baseline_predict(const Image& measurement, const ViewGeometry& geometry,
                       const std::vector<double>& z_planes_um, const BaselinePredictorConfig& config);

}  // namespace scatterfield
