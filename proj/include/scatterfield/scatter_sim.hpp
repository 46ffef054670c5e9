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

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scatterfield/grid.hpp"
#include "scatterfield/kernels.hpp"
#include "scatterfield/optics.hpp"
#include "scatterfield/rng.hpp"
#include "scatterfield/volume_synth.hpp"

namespace scatterfield {

enum class MeasurementKind { free_space, scattering, noisy };

std::string to_string(MeasurementKind kind);
MeasurementKind measurement_kind_from_string(const std::string& s);

struct NoiseParams {
  double a = 1.49e-4;
  double b = 5.41e-6;
  std::uint64_t seed = 0;

  friend bool operator==(const NoiseParams&, const NoiseParams&) = default;
};

struct AttenuationModel {
  double scattering_length_um = 160.0;
  double surface_z_um = 0.0;

  void validate() const;
  friend bool operator==(const AttenuationModel&, const AttenuationModel&) = default;
};

struct SimMeta {
  double alpha = 1.0;
  double sbr_target = 0.0;
  double sbr_realized = 0.0;
  double s_bar = 0.0;
  double bg_bar = 0.0;
  /// Maximum of the raw free-space rendering (the max-normalisation divisor).
  double free_space_scale = 0.0;
  bool empty_volume = false;
  bool clipped = false;
  std::optional<NoiseParams> noise;
  std::optional<AttenuationModel> attenuation;
  std::map<std::string, std::uint64_t> seeds;
};

struct Measurement {
  Image data;
  MeasurementKind kind = MeasurementKind::free_space;
  SimMeta meta;
};

struct BackgroundParams {
  double lattice_pitch_px = 25.0;      // value-noise lattice spacing on the canvas
  double blur_sigma_min_um = 31.2;     // object space
  double blur_sigma_max_um = 48.0;
  double envelope_sigma_um = 0.0;      // object space; 0 selects view_size * pitch / 4
  std::size_t canvas_size = 600;
  double object_pitch_um = 4.15;       // object-space size of one sensor pixel
  bool shared = false;                 // one canvas replicated across all views
  std::uint64_t seed = 0;

  void validate() const;
  double envelope_sigma_px(std::size_t view_size) const noexcept;
};

struct Background {
  Image image;            // max-normalised, sensor shaped
  double bg_bar = 0.0;    // mean of the blurred canvases before the envelope, same scale as `image`
  double blur_sigma_um = 0.0;
  double normalization = 0.0;
};

// --- free-space rendering ---------------------------------------------------------

enum class RenderMethod { automatic, direct, fft };

/// Precomputes whatever the chosen convolution path needs for one PSF stack and
/// renders volumes against it: out(p) = sum_z sum_q V_z(q) PSF_z(p - q + c_V) with
/// c_V the volume centre voxel, so the on-axis voxel lands on the kernel origin.
/// Automatic selection uses the direct sparse path for compact kernels (at most
/// 5% non-zero on average) and FFT otherwise.
class FreeSpaceRenderer {
 public:
  FreeSpaceRenderer(const PsfStack& psf, Shape2 volume_plane, RenderMethod method = RenderMethod::automatic,
                    std::size_t spectrum_budget_bytes = std::size_t{512} << 20);
  ~FreeSpaceRenderer();
  FreeSpaceRenderer(FreeSpaceRenderer&&) noexcept;
  FreeSpaceRenderer& operator=(FreeSpaceRenderer&&) noexcept;

  /// Linear rendering before max-normalisation.
  Image render_raw(const Grid3& volume) const;

  RenderMethod method() const noexcept { return method_; }
  Shape2 sensor_shape() const noexcept { return sensor_; }
  std::size_t planes() const noexcept { return planes_; }

 private:
  RenderMethod method_;
  Shape2 sensor_;
  Shape2 volume_plane_;
  std::size_t planes_ = 0;
  std::array<long, 2> anchor_{};
  std::vector<kernels::SparseKernel> sparse_;
  std::vector<Image> dense_;
  std::unique_ptr<kernels::FftConvolver> fft_;
  std::vector<kernels::FftConvolver::Spectrum> spectra_;
};

Measurement render_free_space(const Volume& volume, const FreeSpaceRenderer& renderer);
Measurement render_free_space(const Volume& volume, const PsfStack& psf);

// --- background -------------------------------------------------------------------

/// Bilinear interpolation of lattice values onto a canvas; node (i, j) sits at
/// canvas pixel (i * pitch, j * pitch).
Image interpolate_lattice(const Image& lattice, std::size_t canvas_size, double pitch);
/// Uniform [0, 1] lattice values, interpolated.
Image value_noise(std::size_t canvas_size, double pitch, Engine& engine);

/// One value-noise canvas resampled to view_size and blurred by sigma_um (object space).
Image blurred_canvas(const BackgroundParams& params, std::size_t view_size, double sigma_um, Engine& engine);

/// Multiplies view-sized canvases (nine, or one when shared) by the envelope,
/// places them in the view crops (zero elsewhere) and max-normalises.
Background place_background(std::span<const Image> canvases, const BackgroundParams& params,
                            const ViewGeometry& geometry);

/// Draws the blur sigma, builds the canvases and places them.
Background generate_background(const BackgroundParams& params, const ViewGeometry& geometry);

// --- calibration and composition ----------------------------------------------

/// Values of the 8-connected regional maxima (plateaus count once) with value > 0.
std::vector<double> regional_maxima(const Image& img);
/// Mean regional-maximum value; throws Error(data) when there is none.
double compute_s_bar(const Image& free_space);
/// alpha = (sbr - 1) * bg_bar / s_bar.
double calibrate_alpha(double sbr_target, double s_bar, double bg_bar);
double realized_sbr(double alpha, double s_bar, double bg_bar) noexcept;

/// g = alpha * free_space + background.
Measurement compose_scattering(const Measurement& free_space, const Image& background, double alpha,
                               double s_bar, double bg_bar);

/// f = g + sqrt(a g + b) xi, deterministic in params.seed.
Measurement apply_mpg_noise(const Measurement& g, const NoiseParams& params, bool clip_at_zero = false);
/// a ~ N(1.49e-4, 0.57e-4), b ~ N(5.41e-6, 2.78e-6), each redrawn until positive.
NoiseParams sample_noise_params(std::uint64_t seed);

// --- attenuation ------------------------------------------------------------------

double attenuation_factor(double z_um, const AttenuationModel& model) noexcept;
/// Scales plane k by attenuation_factor(z_k); each emitter takes the factor of
/// its nearest plane.
Volume apply_attenuation(const Volume& volume, const AttenuationModel& model);

// --- full pipeline ----------------------------------------------------------------

struct SimulationRequest {
  double sbr_target = 2.0;
  BackgroundParams background;
  std::optional<NoiseParams> noise;
  bool clip = false;
  std::optional<AttenuationModel> attenuation;
};

struct SimulationResult {
  Measurement measurement;   // noisy when noise was requested, else scattering
  Measurement clean;         // scattering measurement before noise
  Measurement free_space;    // normalised rendering of the (possibly attenuated) volume
  Image background;
  Volume ground_truth;       // unattenuated volume
};

/// [attenuate] -> render -> normalise -> background -> calibrate alpha -> compose -> [noise].
/// S-bar, alpha and the normalisation divisor come from the unattenuated rendering,
/// so a test-mode call differs from the training-mode call only by the plane scaling.
SimulationResult simulate_pair(const Volume& volume, const FreeSpaceRenderer& renderer,
                               const ViewGeometry& geometry, const SimulationRequest& request);

}  // namespace scatterfield
