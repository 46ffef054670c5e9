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

#include "scatterfield/scatter_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "scatterfield/error.hpp"
#include "scatterfield/rng.hpp"

namespace scatterfield {

std::string to_string(MeasurementKind kind) {
  switch (kind) {
    case MeasurementKind::free_space: return "free_space";
    case MeasurementKind::scattering: return "scattering";
    case MeasurementKind::noisy: return "noisy";
  }
  return "unknown";
}

MeasurementKind measurement_kind_from_string(const std::string& s) {
  if (s == "free_space") return MeasurementKind::free_space;
  if (s == "scattering") return MeasurementKind::scattering;
  if (s == "noisy") return MeasurementKind::noisy;
  fail(ErrorKind::format, "unknown measurement kind \"" + s + "\"");
}

// --- rendering ------------------------------------------------------------------

FreeSpaceRenderer::FreeSpaceRenderer(const PsfStack& psf, Shape2 volume_plane, RenderMethod method,
                                     std::size_t spectrum_budget_bytes)
    : method_(method), sensor_(psf.kernel_shape()), volume_plane_(volume_plane), planes_(psf.planes()) {
  psf.validate();
  require(volume_plane.rows > 0 && volume_plane.cols > 0, ErrorKind::invalid_argument,
          "renderer: empty volume plane");
  anchor_ = {static_cast<long>(volume_plane.rows / 2), static_cast<long>(volume_plane.cols / 2)};

  if (method_ == RenderMethod::automatic) {
    std::size_t nonzero = 0;
    for (const Image& k : psf.kernels)
      nonzero += static_cast<std::size_t>(std::count_if(k.values().begin(), k.values().end(),
                                                        [](double v) { return v != 0.0; }));
    const double density = static_cast<double>(nonzero) / static_cast<double>(planes_ * sensor_.size());
    method_ = density <= 0.05 ? RenderMethod::direct : RenderMethod::fft;
  }

  if (method_ == RenderMethod::direct) {
    sparse_.reserve(planes_);
    for (const Image& k : psf.kernels) sparse_.push_back(kernels::make_sparse_kernel(k));
    return;
  }
  fft_ = std::make_unique<kernels::FftConvolver>(volume_plane, sensor_, anchor_);
  const std::size_t bytes = planes_ * fft_->spectrum_size() * sizeof(std::complex<double>);
  if (bytes <= spectrum_budget_bytes) {
    spectra_.resize(planes_);
    const long n = static_cast<long>(planes_);
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < n; ++k)
      spectra_[static_cast<std::size_t>(k)] = fft_->kernel_spectrum(psf.kernels[static_cast<std::size_t>(k)]);
  } else {
    dense_ = psf.kernels;
  }
}

FreeSpaceRenderer::~FreeSpaceRenderer() = default;
FreeSpaceRenderer::FreeSpaceRenderer(FreeSpaceRenderer&&) noexcept = default;
FreeSpaceRenderer& FreeSpaceRenderer::operator=(FreeSpaceRenderer&&) noexcept = default;

Image FreeSpaceRenderer::render_raw(const Grid3& volume) const {
  if (volume.planes() != planes_)
    fail(ErrorKind::shape_mismatch, "render: volume has " + std::to_string(volume.planes()) +
                                        " planes, PSF stack has " + std::to_string(planes_));
  require(volume.plane_shape() == volume_plane_, ErrorKind::shape_mismatch,
          "render: volume plane shape differs from the renderer's");
  if (method_ == RenderMethod::direct) {
    Image out(sensor_);
    kernels::scatter_convolve(volume, sparse_, anchor_, out);
    return out;
  }
  Image out = fft_->convolve_sum(volume, spectra_, dense_);
  // Non-negative inputs and kernels: anything at roundoff level is exactly zero.
  // Left in place, the ripple would create spurious regional maxima.
  double peak = 0.0;
  for (double v : out.values()) peak = std::max(peak, std::abs(v));
  const double floor = 1e-12 * peak;
  for (double& v : out.values())
    if (v <= floor) v = 0.0;
  return out;
}

Measurement render_free_space(const Volume& volume, const FreeSpaceRenderer& renderer) {
  Measurement m;
  m.kind = MeasurementKind::free_space;
  m.data = renderer.render_raw(volume.data);
  m.meta.free_space_scale = normalize_by_max(m.data.values());
  m.meta.empty_volume = m.meta.free_space_scale == 0.0;
  return m;
}

Measurement render_free_space(const Volume& volume, const PsfStack& psf) {
  if (volume.data.planes() != psf.planes())
    fail(ErrorKind::shape_mismatch, "render: volume has " + std::to_string(volume.data.planes()) +
                                        " planes, PSF stack has " + std::to_string(psf.planes()));
  return render_free_space(volume, FreeSpaceRenderer(psf, volume.data.plane_shape()));
}

// --- calibration -----------------------------------------------------------------

std::vector<double> regional_maxima(const Image& img) {
  const long rows = static_cast<long>(img.rows());
  const long cols = static_cast<long>(img.cols());
  std::vector<std::uint8_t> seen(img.size(), 0);
  std::vector<long> stack;
  std::vector<double> peaks;
  for (long start = 0; start < rows * cols; ++start) {
    if (seen[static_cast<std::size_t>(start)]) continue;
    const double v = img.data()[start];
    if (!(v > 0.0)) {
      seen[static_cast<std::size_t>(start)] = 1;
      continue;
    }
    // Flood the plateau of equal values; it is a maximum if no neighbour is higher.
    bool is_max = true;
    stack.assign(1, start);
    seen[static_cast<std::size_t>(start)] = 1;
    while (!stack.empty()) {
      const long i = stack.back();
      stack.pop_back();
      const long r = i / cols;
      const long c = i % cols;
      for (long dr = -1; dr <= 1; ++dr)
        for (long dc = -1; dc <= 1; ++dc) {
          const long nr = r + dr;
          const long nc = c + dc;
          if ((dr == 0 && dc == 0) || nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
          const long j = nr * cols + nc;
          const double w = img.data()[j];
          if (w > v) {
            is_max = false;
          } else if (w == v && !seen[static_cast<std::size_t>(j)]) {
            seen[static_cast<std::size_t>(j)] = 1;
            stack.push_back(j);
          }
        }
    }
    if (is_max) peaks.push_back(v);
  }
  return peaks;
}

double compute_s_bar(const Image& free_space) {
  const std::vector<double> peaks = regional_maxima(free_space);
  if (peaks.empty()) fail(ErrorKind::data, "S-bar undefined: free-space measurement has no emitter peaks");
  return sum_values(peaks) / static_cast<double>(peaks.size());
}

double calibrate_alpha(double sbr_target, double s_bar, double bg_bar) {
  require(sbr_target >= 1.0, ErrorKind::invalid_argument, "calibrate_alpha: target SBR must be >= 1");
  require(s_bar > 0.0, ErrorKind::invalid_argument, "calibrate_alpha: S-bar must be positive");
  require(bg_bar > 0.0, ErrorKind::invalid_argument, "calibrate_alpha: BG-bar must be positive");
  return (sbr_target - 1.0) * bg_bar / s_bar;
}

double realized_sbr(double alpha, double s_bar, double bg_bar) noexcept { return (alpha * s_bar + bg_bar) / bg_bar; }

Measurement compose_scattering(const Measurement& free_space, const Image& background, double alpha,
                               double s_bar, double bg_bar) {
  require(free_space.data.shape() == background.shape(), ErrorKind::shape_mismatch,
          "compose_scattering: free-space and background shapes differ");
  require(alpha >= 0.0, ErrorKind::invalid_argument, "compose_scattering: alpha must be non-negative");
  Measurement g;
  g.kind = MeasurementKind::scattering;
  g.meta = free_space.meta;
  g.meta.alpha = alpha;
  g.meta.s_bar = s_bar;
  g.meta.bg_bar = bg_bar;
  g.meta.sbr_realized = realized_sbr(alpha, s_bar, bg_bar);
  g.data = Image(background.shape());
  auto fs = free_space.data.values();
  auto bg = background.values();
  auto out = g.data.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = alpha * fs[i] + bg[i];
  return g;
}

// --- noise ------------------------------------------------------------------------

Measurement apply_mpg_noise(const Measurement& g, const NoiseParams& params, bool clip_at_zero) {
  Measurement f = g;
  f.kind = MeasurementKind::noisy;
  f.meta.noise = params;
  f.meta.clipped = clip_at_zero;
  f.meta.seeds["noise"] = params.seed;
  if (params.a == 0.0 && params.b == 0.0) return f;
  kernels::add_mpg_noise(f.data, params.a, params.b, params.seed, clip_at_zero);
  return f;
}

NoiseParams sample_noise_params(std::uint64_t seed) {
  Engine engine(seed);
  std::normal_distribution<double> a(1.49e-4, 0.57e-4);
  std::normal_distribution<double> b(5.41e-6, 2.78e-6);
  NoiseParams p;
  do p.a = a(engine);
  while (p.a <= 0.0);
  do p.b = b(engine);
  while (p.b <= 0.0);
  p.seed = derive_seed(seed, {1});
  return p;
}

// --- attenuation ----------------------------------------------------------------

void AttenuationModel::validate() const {
  require(scattering_length_um > 0.0 && std::isfinite(scattering_length_um), ErrorKind::invalid_argument,
          "attenuation: scattering length must be positive");
}

double attenuation_factor(double z_um, const AttenuationModel& model) noexcept {
  const double depth = std::max(0.0, z_um - model.surface_z_um);
  return std::exp(-depth / model.scattering_length_um);
}

Volume apply_attenuation(const Volume& volume, const AttenuationModel& model) {
  model.validate();
  Volume out = volume;
  const std::size_t planes = volume.data.planes();
  std::vector<double> factor(planes);
  for (std::size_t k = 0; k < planes; ++k) {
    factor[k] = attenuation_factor(volume.grid.z_of_plane(static_cast<double>(k)), model);
    for (double& v : out.data.plane(k)) v *= factor[k];
  }
  for (Emitter& e : out.emitters) {
    const double k = std::clamp(std::round(volume.grid.plane_of_z(e.z_um)), 0.0, static_cast<double>(planes - 1));
    e.brightness *= factor[static_cast<std::size_t>(k)];
  }
  return out;
}

// --- pipeline ------------------------------------------------------------------------

SimulationResult simulate_pair(const Volume& volume, const FreeSpaceRenderer& renderer,
                               const ViewGeometry& geometry, const SimulationRequest& request) {
  require(request.sbr_target >= 1.0, ErrorKind::invalid_argument, "simulate: target SBR must be >= 1");
  require(geometry.sensor == renderer.sensor_shape(), ErrorKind::shape_mismatch,
          "simulate: view geometry sensor differs from the PSF kernel shape");

  Image reference = renderer.render_raw(volume.data);
  const double scale = max_value(reference.values());
  if (!(scale > 0.0)) fail(ErrorKind::data, "simulate: volume renders to an all-zero measurement");
  for (double& v : reference.values()) v /= scale;
  const double s_bar = compute_s_bar(reference);

  SimulationResult result;
  result.ground_truth = volume;
  result.free_space.kind = MeasurementKind::free_space;
  result.free_space.meta.free_space_scale = scale;
  if (request.attenuation) {
    const Volume attenuated = apply_attenuation(volume, *request.attenuation);
    result.free_space.data = renderer.render_raw(attenuated.data);
    for (double& v : result.free_space.data.values()) v /= scale;
    result.free_space.meta.attenuation = request.attenuation;
  } else {
    result.free_space.data = std::move(reference);
  }

  Background bg = generate_background(request.background, geometry);
  const double alpha = calibrate_alpha(request.sbr_target, s_bar, bg.bg_bar);
  result.clean = compose_scattering(result.free_space, bg.image, alpha, s_bar, bg.bg_bar);
  result.clean.meta.sbr_target = request.sbr_target;
  result.clean.meta.seeds["background"] = request.background.seed;
  result.background = std::move(bg.image);

  if (request.noise) {
    result.measurement = apply_mpg_noise(result.clean, *request.noise, request.clip);
  } else {
    result.measurement = result.clean;
  }
  return result;
}

}  // namespace scatterfield
