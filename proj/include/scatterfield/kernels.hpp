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

// OpenMP-parallel numerical kernels used by the simulator modules. Every
// kernel here has a serial counterpart in reference.hpp that the tests treat
// as an oracle and the benchmarks compare against.

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "scatterfield/grid.hpp"
#include "scatterfield/volume_synth.hpp"

namespace scatterfield::kernels {

// --- rasterisation --------------------------------------------------------

/// Coarse voxel values of the sphere set, computed per coarse plane without
/// materialising the fine grid. `out` must already have the grid's shape.
void rasterize_spheres(std::span<const Emitter> emitters, const GridSpec& grid, Grid3& out);

// --- convolution ----------------------------------------------------------

/// Non-zero entries of a kernel stored as contiguous row runs.
struct SparseKernel {
  struct Run {
    int row = 0;
    int col = 0;
    std::size_t offset = 0;  // into weights
    std::size_t length = 0;
  };
  std::vector<Run> runs;
  std::vector<double> weights;

  std::size_t nonzeros() const noexcept { return weights.size(); }
};

SparseKernel make_sparse_kernel(const Image& kernel);

/// Linear ("same"-anchored) convolution of every volume plane with its own
/// kernel, summed over planes:
///   out(p) = sum_k sum_q V_k(q) K_k(p - q + anchor)
/// Output rows are partitioned across threads so every pixel accumulates its
/// terms in the same order regardless of thread count.
void scatter_convolve(const Grid3& volume, std::span<const SparseKernel> kernels,
                      std::array<long, 2> anchor, Image& out);

/// FFT-based linear convolution with zero padding large enough that no
/// circular wrap reaches the output window.
class FftConvolver {
 public:
  FftConvolver(Shape2 input, Shape2 kernel, std::array<long, 2> anchor);
  ~FftConvolver();
  FftConvolver(const FftConvolver&) = delete;
  FftConvolver& operator=(const FftConvolver&) = delete;

  using Spectrum = std::vector<std::complex<double>>;

  Spectrum kernel_spectrum(const Image& kernel) const;
  std::size_t spectrum_size() const noexcept;
  Shape2 padded_shape() const noexcept;

  /// Sum over planes of input_k (*) kernel_k; spectra are either precomputed
  /// (one per plane) or computed on demand from `kernels` when `spectra` is empty.
  Image convolve_sum(const Grid3& volume, std::span<const Spectrum> spectra,
                     std::span<const Image> kernels) const;

 private:
  struct Plans;
  Shape2 input_;
  Shape2 kernel_;
  std::array<long, 2> anchor_;
  Shape2 padded_;
  std::unique_ptr<Plans> plans_;
};

/// Smallest n >= x whose only prime factors are 2, 3, 5, 7.
std::size_t fft_friendly_size(std::size_t x);

// --- filters ----------------------------------------------------------------

/// Normalised sampled Gaussian of half-width `radius` (default ceil(4 sigma)).
std::vector<double> gaussian_taps(double sigma, int radius = -1);

/// Separable Gaussian blur with mirror-reflect borders.
Image gaussian_blur(const Image& in, double sigma, int radius = -1);

/// Bilinear resampling with pixel-area alignment (corners of the pixel grids coincide).
Image resize_bilinear(const Image& in, Shape2 out_shape);

// --- morphology ---------------------------------------------------------------

/// Half-widths of the digital disk of the given radius, indexed by dy + radius.
std::vector<int> disk_half_widths(int radius);

/// Flat grey-scale erosion / dilation with a disk. Pixels outside the image do
/// not participate. Uses per-row van Herk/Gil-Werman running extrema.
Image erode_disk(const Image& in, int radius);
Image dilate_disk(const Image& in, int radius);

// --- light-field shift-and-add -------------------------------------------------

/// out(p) = mean over views i whose sample position p + shift_i lies inside the
/// frame of bilinear(view_i, p + shift_i). Shifts are (row, col) in pixels.
Image shift_and_add(std::span<const Image> views, std::span<const std::array<double, 2>> shifts);

/// Bilinear sample at (y, x); returns false (and 0) outside [0, rows-1] x [0, cols-1].
bool sample_bilinear(const Image& img, double y, double x, double& value) noexcept;

// --- noise -----------------------------------------------------------------------

/// f = g + sqrt(a g + b) * xi. Each image row owns an RNG stream derived from
/// (seed, row), so results do not depend on the thread count.
void add_mpg_noise(Image& g, double a, double b, std::uint64_t seed, bool clip_at_zero);

}  // namespace scatterfield::kernels
