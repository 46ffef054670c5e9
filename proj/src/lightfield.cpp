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

#include "scatterfield/lightfield.hpp"

#include <algorithm>

#include "scatterfield/error.hpp"
#include "scatterfield/kernels.hpp"

namespace scatterfield {

ViewStack extract_views(const Image& measurement, const ViewGeometry& geometry) {
  require(measurement.shape() == geometry.sensor, ErrorKind::shape_mismatch,
          "extract_views: measurement shape differs from the geometry's sensor");
  geometry.validate();
  ViewStack stack;
  stack.geometry = geometry;
  stack.views.reserve(kViewCount);
  for (std::size_t i = 0; i < kViewCount; ++i) {
    const CropRect crop = geometry.crop(i);
    Image view(crop.rows, crop.cols);
    for (std::size_t r = 0; r < crop.rows; ++r) {
      auto src = measurement.row(static_cast<std::size_t>(crop.row) + r);
      std::copy_n(src.begin() + crop.col, crop.cols, view.row(r).begin());
    }
    stack.views.push_back(std::move(view));
  }
  return stack;
}

Image assemble_views(const ViewStack& views) {
  Image out(views.geometry.sensor);
  for (std::size_t i = 0; i < views.views.size(); ++i) {
    const CropRect crop = views.geometry.crop(i);
    for (std::size_t r = 0; r < crop.rows; ++r)
      std::copy(views.views[i].row(r).begin(), views.views[i].row(r).end(),
                out.row(static_cast<std::size_t>(crop.row) + r).begin() + crop.col);
  }
  return out;
}

RefocusedVolume refocus(const ViewStack& views, const std::vector<double>& z_planes_um) {
  require(views.views.size() == kViewCount, ErrorKind::invalid_argument, "refocus: need 9 views");
  const Shape2 shape = views.views.front().shape();
  RefocusedVolume out;
  out.z_planes_um = z_planes_um;
  out.planes = Grid3(z_planes_um.size(), shape.rows, shape.cols);
  std::vector<std::array<double, 2>> shifts(kViewCount);
  for (std::size_t k = 0; k < z_planes_um.size(); ++k) {
    for (std::size_t i = 0; i < kViewCount; ++i) shifts[i] = views.geometry.parallax_shift(i, z_planes_um[k]);
    const Image plane = kernels::shift_and_add(views.views, shifts);
    std::copy(plane.values().begin(), plane.values().end(), out.planes.plane(k).begin());
  }
  return out;
}

}  // namespace scatterfield
