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

#include "scatterfield/error.hpp"
#include "scatterfield/kernels.hpp"

namespace scatterfield::kernels {

bool sample_bilinear(const Image& img, double y, double x, double& value) noexcept {
  const double max_r = static_cast<double>(img.rows()) - 1.0;
  const double max_c = static_cast<double>(img.cols()) - 1.0;
  if (!(y >= 0.0 && y <= max_r && x >= 0.0 && x <= max_c)) {
    value = 0.0;
    return false;
  }
  std::size_t r0 = static_cast<std::size_t>(y);
  std::size_t c0 = static_cast<std::size_t>(x);
  if (r0 + 1 >= img.rows()) r0 = img.rows() >= 2 ? img.rows() - 2 : 0;
  if (c0 + 1 >= img.cols()) c0 = img.cols() >= 2 ? img.cols() - 2 : 0;
  const double ty = y - static_cast<double>(r0);
  const double tx = x - static_cast<double>(c0);
  const std::size_t r1 = std::min(r0 + 1, img.rows() - 1);
  const std::size_t c1 = std::min(c0 + 1, img.cols() - 1);
  // Weighted form so node values are reproduced exactly at t = 0 and t = 1.
  value = (1 - ty) * ((1 - tx) * img(r0, c0) + tx * img(r0, c1)) + ty * ((1 - tx) * img(r1, c0) + tx * img(r1, c1));
  return true;
}

Image resize_bilinear(const Image& in, Shape2 out_shape) {
  require(!in.empty(), ErrorKind::invalid_argument, "resize_bilinear: empty input");
  Image out(out_shape);
  const double sy = static_cast<double>(in.rows()) / static_cast<double>(out_shape.rows);
  const double sx = static_cast<double>(in.cols()) / static_cast<double>(out_shape.cols);
  const double max_r = static_cast<double>(in.rows()) - 1.0;
  const double max_c = static_cast<double>(in.cols()) - 1.0;
  const long rows = static_cast<long>(out_shape.rows);

#pragma omp parallel for schedule(static)
  for (long r = 0; r < rows; ++r) {
    const double y = std::clamp((static_cast<double>(r) + 0.5) * sy - 0.5, 0.0, max_r);
    auto dst = out.row(static_cast<std::size_t>(r));
    for (std::size_t c = 0; c < out_shape.cols; ++c) {
      const double x = std::clamp((static_cast<double>(c) + 0.5) * sx - 0.5, 0.0, max_c);
      double v = 0.0;
      sample_bilinear(in, y, x, v);
      dst[c] = v;
    }
  }
  return out;
}

Image shift_and_add(std::span<const Image> views, std::span<const std::array<double, 2>> shifts) {
  require(!views.empty() && views.size() == shifts.size(), ErrorKind::invalid_argument,
          "shift_and_add: need one shift per view");
  const Shape2 shape = views.front().shape();
  for (const Image& v : views)
    require(v.shape() == shape, ErrorKind::shape_mismatch, "shift_and_add: views differ in shape");
  Image out(shape);
  const long rows = static_cast<long>(shape.rows);

#pragma omp parallel for schedule(static)
  for (long r = 0; r < rows; ++r) {
    auto dst = out.row(static_cast<std::size_t>(r));
    for (std::size_t c = 0; c < shape.cols; ++c) {
      double acc = 0.0;
      int count = 0;
      for (std::size_t i = 0; i < views.size(); ++i) {
        double v = 0.0;
        if (sample_bilinear(views[i], static_cast<double>(r) + shifts[i][0],
                            static_cast<double>(c) + shifts[i][1], v)) {
          acc += v;
          ++count;
        }
      }
      dst[c] = count > 0 ? acc / count : 0.0;
    }
  }
  return out;
}

}  // namespace scatterfield::kernels
