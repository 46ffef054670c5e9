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
#include <functional>
#include <limits>
#include <vector>

#include "scatterfield/error.hpp"
#include "scatterfield/kernels.hpp"

namespace scatterfield::kernels {

std::vector<int> disk_half_widths(int radius) {
  require(radius >= 0, ErrorKind::invalid_argument, "disk radius must be non-negative");
  std::vector<int> widths(static_cast<std::size_t>(2 * radius + 1));
  const double r2 = static_cast<double>(radius) * radius;
  for (int dy = -radius; dy <= radius; ++dy)
    widths[static_cast<std::size_t>(dy + radius)] =
        static_cast<int>(std::floor(std::sqrt(r2 - static_cast<double>(dy) * dy)));
  return widths;
}

namespace {

// Running extremum over [c - h, c + h] with out-of-range samples equal to
// `identity`, in O(n) regardless of h.
template <typename Op>
void running_extremum(std::span<const double> src, int h, double identity, Op op,
                      std::vector<double>& forward, std::vector<double>& backward,
                      std::span<double> dst) {
  const std::size_t n = src.size();
  const std::size_t w = static_cast<std::size_t>(2 * h + 1);
  const std::size_t padded = n + 2 * static_cast<std::size_t>(h);
  const std::size_t len = ((padded + w - 1) / w) * w;
  forward.assign(len, identity);
  backward.assign(len, identity);
  for (std::size_t i = 0; i < n; ++i) forward[i + static_cast<std::size_t>(h)] = src[i];
  backward = forward;
  for (std::size_t i = 0; i < len; ++i)
    if (i % w != 0) forward[i] = op(forward[i], forward[i - 1]);
  for (std::size_t i = len; i-- > 0;)
    if (i % w != w - 1 && i + 1 < len) backward[i] = op(backward[i], backward[i + 1]);
  for (std::size_t c = 0; c < n; ++c) dst[c] = op(backward[c], forward[c + w - 1]);
}

template <typename Op>
Image disk_filter(const Image& in, int radius, double identity, Op op) {
  const std::vector<int> widths = disk_half_widths(radius);
  const long rows = static_cast<long>(in.rows());
  const std::size_t cols = in.cols();
  Image out(in.shape(), identity);

#pragma omp parallel
  {
    std::vector<double> forward;
    std::vector<double> backward;
    std::vector<double> line(cols);

#pragma omp for schedule(static)
    for (long r = 0; r < rows; ++r) {
      auto dst = out.row(static_cast<std::size_t>(r));
      for (int dy = -radius; dy <= radius; ++dy) {
        const long sr = r + dy;
        if (sr < 0 || sr >= rows) continue;
        running_extremum(in.row(static_cast<std::size_t>(sr)), widths[static_cast<std::size_t>(dy + radius)],
                         identity, op, forward, backward, line);
        for (std::size_t c = 0; c < cols; ++c) dst[c] = op(dst[c], line[c]);
      }
    }
  }
  return out;
}

}  // namespace

Image erode_disk(const Image& in, int radius) {
  return disk_filter(in, radius, std::numeric_limits<double>::infinity(),
                     [](double a, double b) { return std::min(a, b); });
}

Image dilate_disk(const Image& in, int radius) {
  return disk_filter(in, radius, -std::numeric_limits<double>::infinity(),
                     [](double a, double b) { return std::max(a, b); });
}

}  // namespace scatterfield::kernels
