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

#include "scatterfield/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "scatterfield/error.hpp"
#include "scatterfield/kernels.hpp"
#include "scatterfield/rng.hpp"

namespace scatterfield::reference {

Grid3 rasterize_fine(std::span<const Emitter> emitters, const GridSpec& grid) {
  constexpr std::size_t F = kFineFactor;
  Grid3 fine(grid.planes * F, grid.rows * F, grid.cols * F);
  const double fxy = grid.pitch_xy_um / F;
  const double fz = grid.pitch_z_um / F;
  const auto offset = [](std::size_t sub) { return static_cast<double>(sub) - static_cast<double>(F / 2); };
  for (std::size_t kf = 0; kf < fine.planes(); ++kf) {
    const double zc = grid.z_of_plane(static_cast<double>(kf / F)) + offset(kf % F) * fz;
    const double z0 = zc - 0.5 * fz;
    const double z1 = zc + 0.5 * fz;
    for (std::size_t rf = 0; rf < fine.rows(); ++rf) {
      const double y = grid.y_of_row(static_cast<double>(rf / F)) + offset(rf % F) * fxy;
      for (std::size_t cf = 0; cf < fine.cols(); ++cf) {
        const double x = grid.x_of_col(static_cast<double>(cf / F)) + offset(cf % F) * fxy;
        double v = 0.0;
        for (const Emitter& e : emitters) {
          const double r = 0.5 * e.diameter_um;
          const double rho2 = (x - e.x_um) * (x - e.x_um) + (y - e.y_um) * (y - e.y_um);
          if (rho2 > r * r) continue;
          const double h = std::sqrt(r * r - rho2);
          const double covered = std::min(z1, e.z_um + h) - std::max(z0, e.z_um - h);
          if (covered > 0.0) v = std::max(v, e.brightness * covered / (z1 - z0));
        }
        fine(kf, rf, cf) = v;
      }
    }
  }
  return fine;
}

Grid3 mean_pool(const Grid3& fine) {
  constexpr std::size_t F = kFineFactor;
  require(fine.planes() % F == 0 && fine.rows() % F == 0 && fine.cols() % F == 0, ErrorKind::shape_mismatch,
          "mean_pool: fine grid is not a multiple of the pooling factor");
  Grid3 coarse(fine.planes() / F, fine.rows() / F, fine.cols() / F);
  for (std::size_t k = 0; k < coarse.planes(); ++k)
    for (std::size_t r = 0; r < coarse.rows(); ++r)
      for (std::size_t c = 0; c < coarse.cols(); ++c) {
        double total = 0.0;
        for (std::size_t a = 0; a < F; ++a)
          for (std::size_t b = 0; b < F; ++b)
            for (std::size_t e = 0; e < F; ++e) total += fine(k * F + a, r * F + b, c * F + e);
        coarse(k, r, c) = total * (1.0 / static_cast<double>(F * F * F));
      }
  return coarse;
}

Image convolve_direct(const Grid3& volume, std::span<const Image> kernels, std::array<long, 2> anchor) {
  require(kernels.size() == volume.planes() && !kernels.empty(), ErrorKind::shape_mismatch,
          "convolve_direct: one kernel per plane required");
  const Shape2 ks = kernels.front().shape();
  Image out(ks);
  for (long pr = 0; pr < static_cast<long>(ks.rows); ++pr)
    for (long pc = 0; pc < static_cast<long>(ks.cols); ++pc) {
      double acc = 0.0;
      for (std::size_t k = 0; k < volume.planes(); ++k)
        for (long qr = 0; qr < static_cast<long>(volume.rows()); ++qr)
          for (long qc = 0; qc < static_cast<long>(volume.cols()); ++qc) {
            const double v = volume(k, static_cast<std::size_t>(qr), static_cast<std::size_t>(qc));
            if (v == 0.0) continue;
            const long jr = pr - qr + anchor[0];
            const long jc = pc - qc + anchor[1];
            if (jr < 0 || jc < 0 || jr >= static_cast<long>(ks.rows) || jc >= static_cast<long>(ks.cols)) continue;
            acc += v * kernels[k](static_cast<std::size_t>(jr), static_cast<std::size_t>(jc));
          }
      out(static_cast<std::size_t>(pr), static_cast<std::size_t>(pc)) = acc;
    }
  return out;
}

namespace {
long mirror(long i, long n) {
  while (i < 0 || i >= n) i = i < 0 ? -i - 1 : 2 * n - 1 - i;
  return i;
}
}  // namespace

Image gaussian_blur_direct(const Image& in, double sigma) {
  const std::vector<double> taps = kernels::gaussian_taps(sigma);
  const long h = static_cast<long>(taps.size() / 2);
  const long rows = static_cast<long>(in.rows());
  const long cols = static_cast<long>(in.cols());
  Image out(in.shape());
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (long dr = -h; dr <= h; ++dr)
        for (long dc = -h; dc <= h; ++dc)
          acc += taps[static_cast<std::size_t>(dr + h)] * taps[static_cast<std::size_t>(dc + h)] *
                 in(static_cast<std::size_t>(mirror(r + dr, rows)), static_cast<std::size_t>(mirror(c + dc, cols)));
      out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = acc;
    }
  return out;
}

namespace {
template <typename Op>
Image disk_naive(const Image& in, int radius, double identity, Op op) {
  const long rows = static_cast<long>(in.rows());
  const long cols = static_cast<long>(in.cols());
  Image out(in.shape());
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c) {
      double acc = identity;
      for (long dy = -radius; dy <= radius; ++dy)
        for (long dx = -radius; dx <= radius; ++dx) {
          if (dx * dx + dy * dy > static_cast<long>(radius) * radius) continue;
          const long y = r + dy, x = c + dx;
          if (y < 0 || x < 0 || y >= rows || x >= cols) continue;
          acc = op(acc, in(static_cast<std::size_t>(y), static_cast<std::size_t>(x)));
        }
      out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = acc;
    }
  return out;
}
}  // namespace

Image erode_disk_naive(const Image& in, int radius) {
  return disk_naive(in, radius, std::numeric_limits<double>::infinity(),
                    [](double a, double b) { return std::min(a, b); });
}

Image dilate_disk_naive(const Image& in, int radius) {
  return disk_naive(in, radius, -std::numeric_limits<double>::infinity(),
                    [](double a, double b) { return std::max(a, b); });
}

Image shift_and_add_naive(std::span<const Image> views, std::span<const std::array<double, 2>> shifts) {
  const Shape2 shape = views.front().shape();
  Image out(shape);
  const double max_r = static_cast<double>(shape.rows) - 1.0;
  const double max_c = static_cast<double>(shape.cols) - 1.0;
  for (std::size_t r = 0; r < shape.rows; ++r)
    for (std::size_t c = 0; c < shape.cols; ++c) {
      double acc = 0.0;
      int n = 0;
      for (std::size_t i = 0; i < views.size(); ++i) {
        const double y = static_cast<double>(r) + shifts[i][0];
        const double x = static_cast<double>(c) + shifts[i][1];
        if (y < 0.0 || x < 0.0 || y > max_r || x > max_c) continue;
        const auto y0 = static_cast<std::size_t>(std::min(std::floor(y), std::max(0.0, max_r - 1.0)));
        const auto x0 = static_cast<std::size_t>(std::min(std::floor(x), std::max(0.0, max_c - 1.0)));
        const std::size_t y1 = std::min(y0 + 1, shape.rows - 1);
        const std::size_t x1 = std::min(x0 + 1, shape.cols - 1);
        const double ty = y - static_cast<double>(y0);
        const double tx = x - static_cast<double>(x0);
        const Image& v = views[i];
        acc += (1 - ty) * ((1 - tx) * v(y0, x0) + tx * v(y0, x1)) + ty * ((1 - tx) * v(y1, x0) + tx * v(y1, x1));
        ++n;
      }
      out(r, c) = n ? acc / n : 0.0;
    }
  return out;
}

void add_mpg_noise_serial(Image& g, double a, double b, std::uint64_t seed, bool clip_at_zero) {
  for (std::size_t r = 0; r < g.rows(); ++r) {
    Engine engine(derive_seed(seed, {static_cast<std::uint64_t>(r)}));
    std::normal_distribution<double> xi(0.0, 1.0);
    for (std::size_t c = 0; c < g.cols(); ++c) {
      double& v = g(r, c);
      v += std::sqrt(a * v + b) * xi(engine);
      if (clip_at_zero && v < 0.0) v = 0.0;
    }
  }
}

std::size_t max_matching_bruteforce(const std::vector<std::vector<char>>& valid) {
  const std::size_t n = valid.size();
  const std::size_t m = n ? valid[0].size() : 0;
  require(m <= 16, ErrorKind::invalid_argument, "max_matching_bruteforce: too many truths");
  // best[i][mask]: most pairs using detections i.. with truths in mask taken.
  std::vector<std::vector<int>> best(n + 1, std::vector<int>(std::size_t{1} << m, 0));
  for (std::size_t i = n; i-- > 0;)
    for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
      int b = best[i + 1][mask];
      for (std::size_t j = 0; j < m; ++j)
        if (valid[i][j] && !(mask & (std::size_t{1} << j)))
          b = std::max(b, 1 + best[i + 1][mask | (std::size_t{1} << j)]);
      best[i][mask] = b;
    }
  return static_cast<std::size_t>(best[0][0]);
}

}  // namespace scatterfield::reference
