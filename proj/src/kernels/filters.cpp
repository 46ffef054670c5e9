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
#include <vector>

#include "scatterfield/error.hpp"
#include "scatterfield/kernels.hpp"

namespace scatterfield::kernels {
namespace {

// Half-sample symmetric reflection: ... 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...
inline long reflect_index(long i, long n) noexcept {
  const long period = 2 * n;
  long m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

}  // namespace

std::vector<double> gaussian_taps(double sigma, int radius) {
  require(sigma > 0.0, ErrorKind::invalid_argument, "gaussian_taps: sigma must be positive");
  if (radius < 0) radius = static_cast<int>(std::ceil(4.0 * sigma));
  std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
    taps[static_cast<std::size_t>(i + radius)] = v;
    total += v;
  }
  for (double& t : taps) t /= total;
  return taps;
}

Image gaussian_blur(const Image& in, double sigma, int radius) {
  const std::vector<double> taps = gaussian_taps(sigma, radius);
  const long half = static_cast<long>(taps.size() / 2);
  const long rows = static_cast<long>(in.rows());
  const long cols = static_cast<long>(in.cols());
  Image tmp(in.shape());
  Image out(in.shape());

#pragma omp parallel for schedule(static)
  for (long r = 0; r < rows; ++r) {
    auto src = in.row(static_cast<std::size_t>(r));
    auto dst = tmp.row(static_cast<std::size_t>(r));
    for (long c = 0; c < cols; ++c) {
      double acc = 0.0;
      if (c >= half && c + half < cols) {
        const double* s = src.data() + c - half;
        for (std::size_t t = 0; t < taps.size(); ++t) acc += taps[t] * s[t];
      } else {
        for (long t = -half; t <= half; ++t)
          acc += taps[static_cast<std::size_t>(t + half)] * src[static_cast<std::size_t>(reflect_index(c + t, cols))];
      }
      dst[static_cast<std::size_t>(c)] = acc;
    }
  }

#pragma omp parallel for schedule(static)
  for (long r = 0; r < rows; ++r) {
    auto dst = out.row(static_cast<std::size_t>(r));
    for (long t = -half; t <= half; ++t) {
      const double w = taps[static_cast<std::size_t>(t + half)];
      auto src = tmp.row(static_cast<std::size_t>(reflect_index(r + t, rows)));
      for (long c = 0; c < cols; ++c) dst[static_cast<std::size_t>(c)] += w * src[static_cast<std::size_t>(c)];
    }
  }
  return out;
}

}  // namespace scatterfield::kernels
