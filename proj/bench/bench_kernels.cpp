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

// Parallel kernels against their serial references. Run with
//   OMP_NUM_THREADS=<n> ./scatterfield_bench
// and compare the *_Parallel and *_Reference rows.

#include <benchmark/benchmark.h>

#include <array>
#include <vector>

#include "scatterfield/kernels.hpp"
#include "scatterfield/reference.hpp"
#include "scatterfield/rng.hpp"
#include "scatterfield/volume_synth.hpp"

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

Grid3 sparse_volume(std::size_t planes, Shape2 s, std::uint64_t seed) {
  Grid3 g(planes, s.rows, s.cols);
  for (double& v : g.values()) {
    const double u = static_cast<double>(uniform_below(seed, 1u << 20)) / (1u << 20);
    v = u < 0.98 ? 0.0 : u;
  }
  return g;
}

struct ConvCase {
  Grid3 volume = sparse_volume(8, {128, 128}, 1);
  std::vector<Image> kernels;
  std::vector<kernels::SparseKernel> sparse;
  std::array<long, 2> anchor{104, 104};
  ConvCase() {
    for (std::uint64_t k = 0; k < 8; ++k) {
      kernels.push_back(random_image({208, 208}, 10 + k, 0.97));
      sparse.push_back(kernels::make_sparse_kernel(kernels.back()));
    }
  }
};

const ConvCase& conv_case() {
  static const ConvCase c;
  return c;
}

void BM_Convolve_Parallel(benchmark::State& st) {
  const ConvCase& c = conv_case();
  Image out(335, 335);
  for (auto _ : st) {
    kernels::scatter_convolve(c.volume, c.sparse, c.anchor, out);
    benchmark::DoNotOptimize(out.values().data());
  }
}
void BM_Convolve_FFT(benchmark::State& st) {
  const ConvCase& c = conv_case();
  const kernels::FftConvolver fft({128, 128}, {208, 208}, c.anchor);
  std::vector<kernels::FftConvolver::Spectrum> spectra;
  for (const Image& k : c.kernels) spectra.push_back(fft.kernel_spectrum(k));
  for (auto _ : st) benchmark::DoNotOptimize(fft.convolve_sum(c.volume, spectra, {}));
}
void BM_Convolve_Reference(benchmark::State& st) {
  const ConvCase& c = conv_case();
  for (auto _ : st) benchmark::DoNotOptimize(reference::convolve_direct(c.volume, c.kernels, c.anchor));
}

void BM_Blur_Parallel(benchmark::State& st) {
  const Image in = random_image({416, 416}, 2);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::gaussian_blur(in, 2.0));
}
void BM_Blur_Reference(benchmark::State& st) {
  const Image in = random_image({416, 416}, 2);
  for (auto _ : st) benchmark::DoNotOptimize(reference::gaussian_blur_direct(in, 2.0));
}

void BM_Erode_Parallel(benchmark::State& st) {
  const Image in = random_image({256, 256}, 3);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::erode_disk(in, 8));
}
void BM_Erode_Reference(benchmark::State& st) {
  const Image in = random_image({256, 256}, 3);
  for (auto _ : st) benchmark::DoNotOptimize(reference::erode_disk_naive(in, 8));
}

struct ViewCase {
  std::vector<Image> views;
  std::vector<std::array<double, 2>> shifts;
  ViewCase() {
    for (std::uint64_t i = 0; i < 9; ++i) {
      views.push_back(random_image({128, 128}, 40 + i));
      shifts.push_back({0.8 * (static_cast<double>(i / 3) - 1.0), -0.8 * (static_cast<double>(i % 3) - 1.0)});
    }
  }
};

void BM_ShiftAdd_Parallel(benchmark::State& st) {
  const ViewCase c;
  for (auto _ : st) benchmark::DoNotOptimize(kernels::shift_and_add(c.views, c.shifts));
}
void BM_ShiftAdd_Reference(benchmark::State& st) {
  const ViewCase c;
  for (auto _ : st) benchmark::DoNotOptimize(reference::shift_and_add_naive(c.views, c.shifts));
}

void BM_Noise_Parallel(benchmark::State& st) {
  const Image clean = random_image({1024, 1024}, 5);
  for (auto _ : st) {
    Image g = clean;
    kernels::add_mpg_noise(g, 1.49e-4, 5.41e-6, 7, true);
    benchmark::DoNotOptimize(g.values().data());
  }
}
void BM_Noise_Reference(benchmark::State& st) {
  const Image clean = random_image({1024, 1024}, 5);
  for (auto _ : st) {
    Image g = clean;
    reference::add_mpg_noise_serial(g, 1.49e-4, 5.41e-6, 7, true);
    benchmark::DoNotOptimize(g.values().data());
  }
}

std::vector<Emitter> bench_emitters(const GridSpec& grid) {
  VolumeRecipe r;
  r.grid = grid;
  r.density_mean_per_mm3 = 20000.0;
  r.seed = 6;
  return sample_emitters(r);
}
const GridSpec kRasterGrid{8, 128, 128, 4.15, 25.0, -87.5};

void BM_Rasterize_Parallel(benchmark::State& st) {
  const auto emitters = bench_emitters(kRasterGrid);
  Grid3 g(kRasterGrid.planes, kRasterGrid.rows, kRasterGrid.cols);
  for (auto _ : st) {
    kernels::rasterize_spheres(emitters, kRasterGrid, g);
    benchmark::DoNotOptimize(g.values().data());
  }
}
void BM_Rasterize_Reference(benchmark::State& st) {
  const auto emitters = bench_emitters(kRasterGrid);
  for (auto _ : st) benchmark::DoNotOptimize(reference::mean_pool(reference::rasterize_fine(emitters, kRasterGrid)));
}

}  // namespace

BENCHMARK(BM_Convolve_Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Convolve_FFT)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Convolve_Reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Blur_Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Blur_Reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Erode_Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Erode_Reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ShiftAdd_Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ShiftAdd_Reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Noise_Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Noise_Reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Rasterize_Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Rasterize_Reference)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
