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

#include "scatterfield/grid.hpp"

#include <algorithm>
#include <numeric>

namespace scatterfield {

Image Grid3::plane_image(std::size_t k) const {
  Image out(rows_, cols_);
  auto src = plane(k);
  std::copy(src.begin(), src.end(), out.values().begin());
  return out;
}

double max_value(std::span<const double> values) noexcept {
  if (values.empty()) return 0.0;
  return *std::max_element(values.begin(), values.end());
}

double sum_values(std::span<const double> values) noexcept {
  return std::accumulate(values.begin(), values.end(), 0.0);
}

double mean_value(std::span<const double> values) noexcept {
  if (values.empty()) return 0.0;
  return sum_values(values) / static_cast<double>(values.size());
}

double normalize_by_max(std::span<double> values) noexcept {
  const double peak = max_value(values);
  if (peak <= 0.0) return 0.0;
  for (double& v : values) v /= peak;
  return peak;
}

}  // namespace scatterfield
