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

// Straightforward serial versions of the parallel kernels. They favour being
// obviously correct over speed; tests compare against them and the benchmarks
// measure the gap.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "scatterfield/grid.hpp"
#include "scatterfield/volume_synth.hpp"

namespace scatterfield::reference {

/// Full fine grid (planes*5, rows*5, cols*5): each fine voxel takes the maximum
/// over spheres of brightness times the covered fraction of its axial slab.
Grid3 rasterize_fine(std::span<const Emitter> emitters, const GridSpec& grid);

/// 5x5x5 mean pooling of a fine grid.
Grid3 mean_pool(const Grid3& fine);

/// out(p) = sum_k sum_q V_k(q) K_k(p - q + anchor), gathered per output pixel.
Image convolve_direct(const Grid3& volume, std::span<const Image> kernels, std::array<long, 2> anchor);

/// Non-separable 2D Gaussian with the same taps and mirror borders as the kernel.
Image gaussian_blur_direct(const Image& in, double sigma);

Image erode_disk_naive(const Image& in, int radius);
Image dilate_disk_naive(const Image& in, int radius);

Image shift_and_add_naive(std::span<const Image> views, std::span<const std::array<double, 2>> shifts);

void add_mpg_noise_serial(Image& g, double a, double b, std::uint64_t seed, bool clip_at_zero);

/// Largest one-to-one matching size by exhaustive search; valid[i][j] marks
/// admissible (detection i, truth j) pairs.
std::size_t max_matching_bruteforce(const std::vector<std::vector<char>>& valid);

}  // namespace scatterfield::reference
