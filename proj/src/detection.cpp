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
#include <cstdint>

#include "scatterfield/error.hpp"
#include "scatterfield/metrics.hpp"

namespace scatterfield {

std::vector<Detection> detect(const Grid3& volume, const GridSpec& grid, double threshold) {
  require(volume.planes() == grid.planes && volume.rows() == grid.rows && volume.cols() == grid.cols,
          ErrorKind::shape_mismatch, "detect: volume shape differs from the grid");
  require(threshold > 0.0, ErrorKind::invalid_argument, "detect: threshold must be positive");
  const long planes = static_cast<long>(volume.planes());
  const long rows = static_cast<long>(volume.rows());
  const long cols = static_cast<long>(volume.cols());
  auto values = volume.values();
  std::vector<std::uint8_t> seen(values.size(), 0);
  std::vector<long> stack;
  std::vector<Detection> out;

  for (long start = 0; start < static_cast<long>(values.size()); ++start) {
    if (seen[static_cast<std::size_t>(start)] || !(values[static_cast<std::size_t>(start)] >= threshold)) continue;
    double mass = 0.0, mk = 0.0, mr = 0.0, mc = 0.0, peak = 0.0;
    stack.assign(1, start);
    seen[static_cast<std::size_t>(start)] = 1;
    while (!stack.empty()) {
      const long i = stack.back();
      stack.pop_back();
      const long k = i / (rows * cols);
      const long r = (i / cols) % rows;
      const long c = i % cols;
      const double v = values[static_cast<std::size_t>(i)];
      mass += v;
      mk += v * static_cast<double>(k);
      mr += v * static_cast<double>(r);
      mc += v * static_cast<double>(c);
      peak = std::max(peak, v);
      for (long dk = -1; dk <= 1; ++dk)
        for (long dr = -1; dr <= 1; ++dr)
          for (long dc = -1; dc <= 1; ++dc) {
            const long nk = k + dk, nr = r + dr, nc = c + dc;
            if (nk < 0 || nk >= planes || nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
            const long j = (nk * rows + nr) * cols + nc;
            if (seen[static_cast<std::size_t>(j)] || !(values[static_cast<std::size_t>(j)] >= threshold)) continue;
            seen[static_cast<std::size_t>(j)] = 1;
            stack.push_back(j);
          }
    }
    Detection d;
    d.x_um = grid.x_of_col(mc / mass);
    d.y_um = grid.y_of_row(mr / mass);
    d.z_um = grid.z_of_plane(mk / mass);
    d.peak_value = peak;
    out.push_back(d);
  }
  return out;
}

}  // namespace scatterfield
