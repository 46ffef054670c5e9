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

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "scatterfield/kernels.hpp"
#include "scatterfield/reference.hpp"

using namespace scatterfield;

namespace {

Image random_image(Shape2 s, std::uint64_t seed, double sparsity = 0.0) {
  Image img(s);
  for (double& v : img.values()) {
    const double u = static_cast<double>(uniform_below(seed, 1u << 20)) / (1u << 20);
    v = u < sparsity ? 0.0 : u;
  }
  return img;
}

Grid3 random_volume(std::size_t planes, Shape2 s, std::uint64_t seed) {
  Grid3 g(planes, s.rows, s.cols);
  for (double& v : g.values()) {
    const double u = static_cast<double>(uniform_below(seed, 1u << 20)) / (1u << 20);
    v = u < 0.9 ? 0.0 : u;
  }
  return g;
}

bool same(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

// Runs f with the given OpenMP thread count and restores the previous one.
template <class F>
auto with_threads(int n, F&& f) {
  const int saved = omp_get_max_threads();
  omp_set_num_threads(n);
  auto result = f();
  omp_set_num_threads(saved);
  return result;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("sparse scatter convolution matches the gather reference") {
  const Shape2 in{21, 17};
  const Grid3 volume = random_volume(3, in, 5);
  std::vector<Image> kernels;
  std::vector<kernels::SparseKernel> sparse;
  for (std::size_t k = 0; k < 3; ++k) {
    kernels.push_back(random_image({25, 29}, 40 + k, 0.7));
    sparse.push_back(kernels::make_sparse_kernel(kernels.back()));
  }
  const std::array<long, 2> anchor{12, 14};
  const Image ref = reference::convolve_direct(volume, kernels, anchor);
  for (int threads : {1, 3, 8}) {
    const Image out = with_threads(threads, [&] {
      Image o(ref.shape());
      kernels::scatter_convolve(volume, sparse, anchor, o);
      return o;
    });
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out.values()[i] == doctest::Approx(ref.values()[i]).epsilon(1e-12));
  }
  // Bit-identical across thread counts.
  const auto run = [&](int t) {
    return with_threads(t, [&] {
      Image o(ref.shape());
      kernels::scatter_convolve(volume, sparse, anchor, o);
      return o;
    });
  };
  CHECK(same(run(1).values(), run(7).values()));
}

TEST_CASE("sparse kernel stores exactly the non-zeros") {
  const Image k = random_image({9, 11}, 3, 0.6);
  const auto s = kernels::make_sparse_kernel(k);
  const auto nz = std::count_if(k.values().begin(), k.values().end(), [](double v) { return v != 0.0; });
  CHECK(s.nonzeros() == static_cast<std::size_t>(nz));
  double total = 0.0;
  for (const auto& run : s.runs)
    for (std::size_t i = 0; i < run.length; ++i) {
      CHECK(s.weights[run.offset + i] == k(static_cast<std::size_t>(run.row), static_cast<std::size_t>(run.col) + i));
      total += s.weights[run.offset + i];
    }
  CHECK(total == doctest::Approx(sum_values(k.values())));
}

TEST_CASE("FFT convolution matches the gather reference") {
  const Shape2 in{24, 20};
  const Grid3 volume = random_volume(2, in, 8);
  const std::vector<Image> kernels = {random_image({30, 26}, 1), random_image({30, 26}, 2)};
  const std::array<long, 2> anchor{15, 13};
  const Image ref = reference::convolve_direct(volume, kernels, anchor);
  const kernels::FftConvolver fft(in, {30, 26}, anchor);
  const Image out = fft.convolve_sum(volume, {}, kernels);
  const double peak = max_value(ref.values());
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(std::abs(out.values()[i] - ref.values()[i]) <= 1e-10 * peak);
  std::vector<kernels::FftConvolver::Spectrum> spectra;
  for (const Image& k : kernels) spectra.push_back(fft.kernel_spectrum(k));
  CHECK(same(fft.convolve_sum(volume, spectra, {}).values(), out.values()));
}

TEST_CASE("FFT-friendly sizes") {
  CHECK(kernels::fft_friendly_size(1) == 1);
  CHECK(kernels::fft_friendly_size(11) == 12);
  CHECK(kernels::fft_friendly_size(97) == 98);
  CHECK(kernels::fft_friendly_size(1031) == 1050);
}

TEST_CASE("separable blur matches the direct 2D Gaussian") {
  for (double sigma : {0.8, 2.5, 6.0}) {
    const Image in = random_image({33, 47}, 17);
    const Image fast = with_threads(4, [&] { return kernels::gaussian_blur(in, sigma); });
    const Image slow = reference::gaussian_blur_direct(in, sigma);
    for (std::size_t i = 0; i < fast.size(); ++i) CHECK(fast.values()[i] == doctest::Approx(slow.values()[i]).epsilon(1e-12));
  }
  const auto taps = kernels::gaussian_taps(2.0);
  CHECK(taps.size() == 17);
  CHECK(sum_values(taps) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("bilinear resize preserves constants and corner alignment") {
  const Image flat(6, 9, 0.3);
  const Image up = kernels::resize_bilinear(flat, {25, 31});
  for (double v : up.values()) CHECK(v == doctest::Approx(0.3).epsilon(1e-15));
  Image ramp(4, 4);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) ramp(r, c) = static_cast<double>(c);
  const Image wide = kernels::resize_bilinear(ramp, {4, 8});
  // Pixel-area alignment: output pixel centres map to (c + 0.5) / 2 - 0.5.
  CHECK(wide(0, 3) == doctest::Approx(1.25));
  CHECK(wide(0, 0) == doctest::Approx(0.0));
  CHECK(wide(0, 7) == doctest::Approx(3.0));
}

TEST_CASE("morphology is independent of the thread count") {
  const Image in = random_image({120, 90}, 23);
  const Image e1 = with_threads(1, [&] { return kernels::erode_disk(in, 7); });
  const Image e8 = with_threads(8, [&] { return kernels::erode_disk(in, 7); });
  CHECK(same(e1.values(), e8.values()));
  CHECK(same(e1.values(), reference::erode_disk_naive(in, 7).values()));
  const auto hw = kernels::disk_half_widths(3);
  CHECK(hw == std::vector<int>{0, 2, 2, 3, 2, 2, 0});
}

TEST_CASE("noise matches the serial reference for every thread count") {
  const Image clean = random_image({64, 48}, 29);
  Image serial = clean;
  reference::add_mpg_noise_serial(serial, 1.49e-4, 5.41e-6, 99, false);
  for (int threads : {1, 2, 5, 16}) {
    const Image out = with_threads(threads, [&] {
      Image g = clean;
      kernels::add_mpg_noise(g, 1.49e-4, 5.41e-6, 99, false);
      return g;
    });
    CHECK(same(out.values(), serial.values()));
  }
  Image clipped = Image(8, 8, 0.0);
  kernels::add_mpg_noise(clipped, 0.0, 1.0, 4, true);
  CHECK(*std::min_element(clipped.values().begin(), clipped.values().end()) >= 0.0);
}

TEST_CASE("rasterizer is independent of the thread count") {
  VolumeRecipe r;
  r.grid = {6, 40, 40, 4.15, 25.0, -75.0};
  r.density_mean_per_mm3 = 30000.0;
  r.seed = 6;
  const auto emitters = sample_emitters(r);
  REQUIRE(emitters.size() > 5);
  const auto run = [&](int t) {
    return with_threads(t, [&] {
      Grid3 g(r.grid.planes, r.grid.rows, r.grid.cols);
      kernels::rasterize_spheres(emitters, r.grid, g);
      return g;
    });
  };
  const Grid3 a = run(1), b = run(6);
  CHECK(same(a.values(), b.values()));
  CHECK(same(a.values(), reference::mean_pool(reference::rasterize_fine(emitters, r.grid)).values()));
}

TEST_CASE("shift-and-add is independent of the thread count") {
  std::vector<Image> views;
  for (std::uint64_t i = 0; i < 9; ++i) views.push_back(random_image({50, 50}, 300 + i));
  std::vector<std::array<double, 2>> shifts(9);
  for (std::size_t i = 0; i < 9; ++i) shifts[i] = {0.7 * (static_cast<double>(i / 3) - 1.0), -1.3 * (static_cast<double>(i % 3) - 1.0)};
  const Image a = with_threads(1, [&] { return kernels::shift_and_add(views, shifts); });
  const Image b = with_threads(9, [&] { return kernels::shift_and_add(views, shifts); });
  CHECK(same(a.values(), b.values()));
}

}  // TEST_SUITE
