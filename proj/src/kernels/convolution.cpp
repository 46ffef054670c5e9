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

#include <fftw3.h>
#include <omp.h>

#include <algorithm>
#include <cstring>
#include <mutex>

#include "scatterfield/error.hpp"
#include "scatterfield/kernels.hpp"

namespace scatterfield::kernels {

SparseKernel make_sparse_kernel(const Image& kernel) {
  SparseKernel sk;
  for (std::size_t r = 0; r < kernel.rows(); ++r) {
    auto row = kernel.row(r);
    std::size_t c = 0;
    while (c < row.size()) {
      if (row[c] == 0.0) {
        ++c;
        continue;
      }
      SparseKernel::Run run;
      run.row = static_cast<int>(r);
      run.col = static_cast<int>(c);
      run.offset = sk.weights.size();
      while (c < row.size() && row[c] != 0.0) sk.weights.push_back(row[c++]);
      run.length = sk.weights.size() - run.offset;
      sk.runs.push_back(run);
    }
  }
  return sk;
}

void scatter_convolve(const Grid3& volume, std::span<const SparseKernel> kernels,
                      std::array<long, 2> anchor, Image& out) {
  require(kernels.size() == volume.planes(), ErrorKind::shape_mismatch,
          "scatter_convolve: kernel count does not match plane count");
  std::fill(out.values().begin(), out.values().end(), 0.0);
  const long out_rows = static_cast<long>(out.rows());
  const long out_cols = static_cast<long>(out.cols());
  const long vol_cols = static_cast<long>(volume.cols());

  // Non-zero voxels per plane, in raster order.
  std::vector<std::vector<std::pair<long, double>>> nonzero(volume.planes());
  for (std::size_t k = 0; k < volume.planes(); ++k) {
    auto plane = volume.plane(k);
    for (std::size_t i = 0; i < plane.size(); ++i)
      if (plane[i] != 0.0) nonzero[k].emplace_back(static_cast<long>(i), plane[i]);
  }

#pragma omp parallel
  {
    const long nthreads = omp_get_num_threads();
    const long tid = omp_get_thread_num();
    const long band = (out_rows + nthreads - 1) / nthreads;
    const long row_lo = std::min(out_rows, tid * band);
    const long row_hi = std::min(out_rows, row_lo + band);

    for (std::size_t k = 0; k < volume.planes(); ++k) {
      const SparseKernel& kernel = kernels[k];
      for (const auto& [index, value] : nonzero[k]) {
        const long qr = index / vol_cols;
        const long qc = index % vol_cols;
        const long dr = qr - anchor[0];
        const long dc = qc - anchor[1];
        for (const SparseKernel::Run& run : kernel.runs) {
          const long pr = run.row + dr;
          if (pr < row_lo || pr >= row_hi) continue;
          long c_begin = run.col + dc;
          long w_begin = 0;
          if (c_begin < 0) {
            w_begin = -c_begin;
            c_begin = 0;
          }
          const long c_end = std::min(out_cols, run.col + dc + static_cast<long>(run.length));
          if (c_end <= c_begin) continue;
          double* dst = out.data() + pr * out_cols;
          const double* w = kernel.weights.data() + run.offset + w_begin;
          for (long c = c_begin; c < c_end; ++c) dst[c] += value * w[c - c_begin];
        }
      }
    }
  }
}

std::size_t fft_friendly_size(std::size_t x) {
  if (x <= 1) return 1;
  for (std::size_t n = x;; ++n) {
    std::size_t m = n;
    for (std::size_t p : {2u, 3u, 5u, 7u})
      while (m % p == 0) m /= p;
    if (m == 1) return n;
  }
}

namespace {
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t bytes) : ptr(fftw_malloc(bytes)) {
    if (ptr == nullptr) fail(ErrorKind::io, "fftw_malloc failed");
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  double* real() { return static_cast<double*>(ptr); }
  fftw_complex* complex() { return static_cast<fftw_complex*>(ptr); }
  void* ptr;
};
}  // namespace

struct FftConvolver::Plans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
  ~Plans() {
    std::lock_guard lock(fftw_planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (inverse) fftw_destroy_plan(inverse);
  }
};

FftConvolver::FftConvolver(Shape2 input, Shape2 kernel, std::array<long, 2> anchor)
    : input_(input), kernel_(kernel), anchor_(anchor), plans_(std::make_unique<Plans>()) {
  padded_ = {fft_friendly_size(input.rows + kernel.rows - 1), fft_friendly_size(input.cols + kernel.cols - 1)};
  const std::size_t real_n = padded_.size();
  FftwBuffer in(sizeof(double) * real_n);
  FftwBuffer out(sizeof(fftw_complex) * spectrum_size());
  std::lock_guard lock(fftw_planner_mutex());
  const int n0 = static_cast<int>(padded_.rows);
  const int n1 = static_cast<int>(padded_.cols);
  plans_->forward = fftw_plan_dft_r2c_2d(n0, n1, in.real(), out.complex(), FFTW_ESTIMATE);
  plans_->inverse = fftw_plan_dft_c2r_2d(n0, n1, out.complex(), in.real(), FFTW_ESTIMATE);
  if (!plans_->forward || !plans_->inverse) fail(ErrorKind::io, "FFTW planning failed");
}

FftConvolver::~FftConvolver() = default;

std::size_t FftConvolver::spectrum_size() const noexcept { return padded_.rows * (padded_.cols / 2 + 1); }
Shape2 FftConvolver::padded_shape() const noexcept { return padded_; }

FftConvolver::Spectrum FftConvolver::kernel_spectrum(const Image& kernel) const {
  require(kernel.shape() == kernel_, ErrorKind::shape_mismatch, "FftConvolver: kernel shape mismatch");
  FftwBuffer in(sizeof(double) * padded_.size());
  FftwBuffer out(sizeof(fftw_complex) * spectrum_size());
  std::memset(in.ptr, 0, sizeof(double) * padded_.size());
  for (std::size_t r = 0; r < kernel_.rows; ++r)
    std::copy(kernel.row(r).begin(), kernel.row(r).end(), in.real() + r * padded_.cols);
  fftw_execute_dft_r2c(plans_->forward, in.real(), out.complex());
  Spectrum s(spectrum_size());
  std::memcpy(s.data(), out.ptr, sizeof(fftw_complex) * spectrum_size());
  return s;
}

Image FftConvolver::convolve_sum(const Grid3& volume, std::span<const Spectrum> spectra,
                                 std::span<const Image> kernels) const {
  require(volume.plane_shape() == input_, ErrorKind::shape_mismatch, "FftConvolver: input shape mismatch");
  const bool precomputed = !spectra.empty();
  require(precomputed ? spectra.size() == volume.planes() : kernels.size() == volume.planes(),
          ErrorKind::shape_mismatch, "FftConvolver: kernel count does not match plane count");
  const std::size_t ns = spectrum_size();
  const long planes = static_cast<long>(volume.planes());
  std::vector<Spectrum> partial(static_cast<std::size_t>(omp_get_max_threads()));

#pragma omp parallel
  {
    Spectrum& local = partial[static_cast<std::size_t>(omp_get_thread_num())];
    FftwBuffer in(sizeof(double) * padded_.size());
    FftwBuffer out(sizeof(fftw_complex) * ns);

#pragma omp for schedule(static)
    for (long k = 0; k < planes; ++k) {
      auto plane = volume.plane(static_cast<std::size_t>(k));
      if (std::all_of(plane.begin(), plane.end(), [](double v) { return v == 0.0; })) continue;
      std::memset(in.ptr, 0, sizeof(double) * padded_.size());
      for (std::size_t r = 0; r < input_.rows; ++r)
        std::copy(plane.begin() + static_cast<long>(r * input_.cols),
                  plane.begin() + static_cast<long>((r + 1) * input_.cols), in.real() + r * padded_.cols);
      fftw_execute_dft_r2c(plans_->forward, in.real(), out.complex());
      const auto* vs = reinterpret_cast<const std::complex<double>*>(out.ptr);
      Spectrum on_demand;
      const Spectrum* ks = nullptr;
      if (precomputed) {
        ks = &spectra[static_cast<std::size_t>(k)];
      } else {
        on_demand = kernel_spectrum(kernels[static_cast<std::size_t>(k)]);
        ks = &on_demand;
      }
      if (local.empty()) local.assign(ns, {0.0, 0.0});
      for (std::size_t i = 0; i < ns; ++i) local[i] += vs[i] * (*ks)[i];
    }
  }

  // Reduce in thread order so the result is reproducible run to run.
  Spectrum total(ns, {0.0, 0.0});
  for (const Spectrum& local : partial)
    for (std::size_t i = 0; i < local.size(); ++i) total[i] += local[i];

  FftwBuffer spec(sizeof(fftw_complex) * ns);
  FftwBuffer real(sizeof(double) * padded_.size());
  std::memcpy(spec.ptr, total.data(), sizeof(fftw_complex) * ns);
  fftw_execute_dft_c2r(plans_->inverse, spec.complex(), real.real());

  const double scale = 1.0 / static_cast<double>(padded_.size());
  Image out(kernel_);
  for (std::size_t r = 0; r < kernel_.rows; ++r) {
    const double* src = real.real() + (r + static_cast<std::size_t>(anchor_[0])) * padded_.cols +
                        static_cast<std::size_t>(anchor_[1]);
    auto dst = out.row(r);
    for (std::size_t c = 0; c < kernel_.cols; ++c) dst[c] = src[c] * scale;
  }
  return out;
}

}  // namespace scatterfield::kernels
