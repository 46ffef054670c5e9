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

#include <vector>

#include "scatterfield/grid.hpp"
#include "scatterfield/optics.hpp"

namespace scatterfield {

/// Nine view crops, row-major over the 3x3 lattice.
struct ViewStack {
  std::vector<Image> views;
  ViewGeometry geometry;
};

struct RefocusedVolume {
  Grid3 planes;
  std::vector<double> z_planes_um;
};

/// Crops view_size x view_size around each view centre, without resampling.
ViewStack extract_views(const Image& measurement, const ViewGeometry& geometry);

/// Writes the views back into a sensor-shaped image (zero outside the crops).
Image assemble_views(const ViewStack& views);

/// Shift-and-add: plane z is the mean over views of view_i sampled at
/// p + parallax_shift(i, z), bilinear, renormalised by the in-frame view count.
RefocusedVolume refocus(const ViewStack& views, const std::vector<double>& z_planes_um);

}  // namespace scatterfield
