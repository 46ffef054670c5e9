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

#include "scatterfield/config_json.hpp"

#include <string>

#include "scatterfield/error.hpp"

namespace scatterfield {

using nlohmann::json;

namespace {

template <typename T>
void read_key(const json& j, const char* key, T& field, const char* block) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    field = it->get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::invalid_argument, std::string(block) + "." + key + ": " + e.what());
  }
}

}  // namespace

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed, const char* block) {
  if (!j.is_object()) fail(ErrorKind::invalid_argument, std::string(block) + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* a : allowed) known = known || it.key() == a;
    if (!known) fail(ErrorKind::invalid_argument, std::string(block) + ": unknown key \"" + it.key() + "\"");
  }
}

void to_json(json& j, const GridSpec& v) {
  j = {{"planes", v.planes},           {"rows", v.rows},           {"cols", v.cols},
       {"pitch_xy_um", v.pitch_xy_um}, {"pitch_z_um", v.pitch_z_um}, {"z0_um", v.z0_um}};
}

void from_json(const json& j, GridSpec& v) {
  reject_unknown_keys(j, {"planes", "rows", "cols", "pitch_xy_um", "pitch_z_um", "z0_um"}, "grid");
  read_key(j, "planes", v.planes, "grid");
  read_key(j, "rows", v.rows, "grid");
  read_key(j, "cols", v.cols, "grid");
  read_key(j, "pitch_xy_um", v.pitch_xy_um, "grid");
  read_key(j, "pitch_z_um", v.pitch_z_um, "grid");
  read_key(j, "z0_um", v.z0_um, "grid");
}

void to_json(json& j, const VolumeRecipe& v) {
  j = {{"seed", v.seed},
       {"density_mean_per_mm3", v.density_mean_per_mm3},
       {"density_std_per_mm3", v.density_std_per_mm3},
       {"diameter_mean_um", v.diameter_mean_um},
       {"diameter_std_um", v.diameter_std_um},
       {"brightness_mean", v.brightness_mean},
       {"brightness_std", v.brightness_std},
       {"grid", v.grid},
       {"fov_diameter_um", v.fov_diameter_um}};
}

void from_json(const json& j, VolumeRecipe& v) {
  reject_unknown_keys(j,
                      {"seed", "density_mean_per_mm3", "density_std_per_mm3", "diameter_mean_um", "diameter_std_um",
                       "brightness_mean", "brightness_std", "grid", "fov_diameter_um"},
                      "volume");
  read_key(j, "seed", v.seed, "volume");
  read_key(j, "density_mean_per_mm3", v.density_mean_per_mm3, "volume");
  read_key(j, "density_std_per_mm3", v.density_std_per_mm3, "volume");
  read_key(j, "diameter_mean_um", v.diameter_mean_um, "volume");
  read_key(j, "diameter_std_um", v.diameter_std_um, "volume");
  read_key(j, "brightness_mean", v.brightness_mean, "volume");
  read_key(j, "brightness_std", v.brightness_std, "volume");
  if (j.contains("grid")) from_json(j.at("grid"), v.grid);
  read_key(j, "fov_diameter_um", v.fov_diameter_um, "volume");
}

void to_json(json& j, const Emitter& v) {
  j = {{"x_um", v.x_um}, {"y_um", v.y_um}, {"z_um", v.z_um}, {"diameter_um", v.diameter_um}, {"brightness", v.brightness}};
}

void from_json(const json& j, Emitter& v) {
  read_key(j, "x_um", v.x_um, "emitter");
  read_key(j, "y_um", v.y_um, "emitter");
  read_key(j, "z_um", v.z_um, "emitter");
  read_key(j, "diameter_um", v.diameter_um, "emitter");
  read_key(j, "brightness", v.brightness, "emitter");
}

void to_json(json& j, const SyntheticPsfParams& v) {
  j = {{"sigma0_um", v.sigma0_um},
       {"beta", v.beta},
       {"parallax_px_per_um", v.parallax_px_per_um},
       {"z_focus_um", v.z_focus_um},
       {"truncate_sigmas", v.truncate_sigmas}};
}

void from_json(const json& j, SyntheticPsfParams& v) {
  reject_unknown_keys(j, {"sigma0_um", "beta", "parallax_px_per_um", "z_focus_um", "truncate_sigmas"}, "psf");
  read_key(j, "sigma0_um", v.sigma0_um, "psf");
  read_key(j, "beta", v.beta, "psf");
  read_key(j, "parallax_px_per_um", v.parallax_px_per_um, "psf");
  read_key(j, "z_focus_um", v.z_focus_um, "psf");
  read_key(j, "truncate_sigmas", v.truncate_sigmas, "psf");
}

void to_json(json& j, const ViewGeometry& v) {
  j = {{"sensor", {v.sensor.rows, v.sensor.cols}},
       {"view_size", v.view_size},
       {"centers", v.centers},
       {"baseline_dirs", v.baseline_dirs},
       {"parallax_px_per_um", v.parallax_px_per_um},
       {"z_focus_um", v.z_focus_um}};
}

void from_json(const json& j, ViewGeometry& v) {
  reject_unknown_keys(j, {"sensor", "view_size", "centers", "baseline_dirs", "parallax_px_per_um", "z_focus_um"},
                      "geometry");
  std::array<std::size_t, 2> sensor{v.sensor.rows, v.sensor.cols};
  read_key(j, "sensor", sensor, "geometry");
  v.sensor = {sensor[0], sensor[1]};
  read_key(j, "view_size", v.view_size, "geometry");
  read_key(j, "centers", v.centers, "geometry");
  read_key(j, "baseline_dirs", v.baseline_dirs, "geometry");
  read_key(j, "parallax_px_per_um", v.parallax_px_per_um, "geometry");
  read_key(j, "z_focus_um", v.z_focus_um, "geometry");
}

void to_json(json& j, const BackgroundParams& v) {
  j = {{"lattice_pitch_px", v.lattice_pitch_px},
       {"blur_sigma_min_um", v.blur_sigma_min_um},
       {"blur_sigma_max_um", v.blur_sigma_max_um},
       {"envelope_sigma_um", v.envelope_sigma_um},
       {"canvas_size", v.canvas_size},
       {"object_pitch_um", v.object_pitch_um},
       {"shared", v.shared},
       {"seed", v.seed}};
}

void from_json(const json& j, BackgroundParams& v) {
  reject_unknown_keys(j,
                      {"lattice_pitch_px", "blur_sigma_min_um", "blur_sigma_max_um", "envelope_sigma_um",
                       "canvas_size", "object_pitch_um", "shared", "seed"},
                      "background");
  read_key(j, "lattice_pitch_px", v.lattice_pitch_px, "background");
  read_key(j, "blur_sigma_min_um", v.blur_sigma_min_um, "background");
  read_key(j, "blur_sigma_max_um", v.blur_sigma_max_um, "background");
  read_key(j, "envelope_sigma_um", v.envelope_sigma_um, "background");
  read_key(j, "canvas_size", v.canvas_size, "background");
  read_key(j, "object_pitch_um", v.object_pitch_um, "background");
  read_key(j, "shared", v.shared, "background");
  read_key(j, "seed", v.seed, "background");
}

void to_json(json& j, const NoiseParams& v) { j = {{"a", v.a}, {"b", v.b}, {"seed", v.seed}}; }

void from_json(const json& j, NoiseParams& v) {
  read_key(j, "a", v.a, "noise");
  read_key(j, "b", v.b, "noise");
  read_key(j, "seed", v.seed, "noise");
}

void to_json(json& j, const AttenuationModel& v) {
  j = {{"ls_um", v.scattering_length_um}, {"surface_z_um", v.surface_z_um}};
}

void from_json(const json& j, AttenuationModel& v) {
  read_key(j, "ls_um", v.scattering_length_um, "attenuation");
  read_key(j, "surface_z_um", v.surface_z_um, "attenuation");
}

void to_json(json& j, const SimMeta& v) {
  j = {{"alpha", v.alpha},
       {"sbr", v.sbr_target},
       {"sbr_target", v.sbr_target},
       {"sbr_realized", v.sbr_realized},
       {"s_bar", v.s_bar},
       {"bg_bar", v.bg_bar},
       {"free_space_scale", v.free_space_scale},
       {"empty_volume", v.empty_volume},
       {"clipped", v.clipped},
       {"noise", v.noise ? json(*v.noise) : json(nullptr)},
       {"attenuation", v.attenuation ? json(*v.attenuation) : json(nullptr)},
       {"ls_um", v.attenuation ? json(v.attenuation->scattering_length_um) : json(nullptr)},
       {"seeds", v.seeds}};
}

void from_json(const json& j, SimMeta& v) {
  read_key(j, "alpha", v.alpha, "meta");
  read_key(j, "sbr_target", v.sbr_target, "meta");
  read_key(j, "sbr_realized", v.sbr_realized, "meta");
  read_key(j, "s_bar", v.s_bar, "meta");
  read_key(j, "bg_bar", v.bg_bar, "meta");
  read_key(j, "free_space_scale", v.free_space_scale, "meta");
  read_key(j, "empty_volume", v.empty_volume, "meta");
  read_key(j, "clipped", v.clipped, "meta");
  if (j.contains("noise") && !j.at("noise").is_null()) v.noise = j.at("noise").get<NoiseParams>();
  if (j.contains("attenuation") && !j.at("attenuation").is_null())
    v.attenuation = j.at("attenuation").get<AttenuationModel>();
  read_key(j, "seeds", v.seeds, "meta");
}

void to_json(json& j, const MatchConfig& v) {
  j = {{"intensity_threshold", v.intensity_threshold},
       {"lateral_tol_um", v.lateral_tol_um},
       {"axial_tol_um", v.axial_tol_um},
       {"matcher", to_string(v.matcher)}};
}

void from_json(const json& j, MatchConfig& v) {
  reject_unknown_keys(j, {"intensity_threshold", "lateral_tol_um", "axial_tol_um", "matcher"}, "match");
  read_key(j, "intensity_threshold", v.intensity_threshold, "match");
  read_key(j, "lateral_tol_um", v.lateral_tol_um, "match");
  read_key(j, "axial_tol_um", v.axial_tol_um, "match");
  if (j.contains("matcher")) v.matcher = matcher_from_string(j.at("matcher").get<std::string>());
}

void to_json(json& j, const BgrParams& v) {
  j = {{"structuring_radius", v.structuring_radius}, {"mode", to_string(v.mode)}};
}

void from_json(const json& j, BgrParams& v) {
  reject_unknown_keys(j, {"structuring_radius", "mode"}, "bgr");
  read_key(j, "structuring_radius", v.structuring_radius, "bgr");
  if (j.contains("mode")) v.mode = bgr_mode_from_string(j.at("mode").get<std::string>());
}

void to_json(json& j, const DepthCounts& v) {
  j = {{"plane", v.plane},
       {"z_um", v.z_um},
       {"emitters", v.emitters},
       {"tp", v.tp},
       {"fp", v.fp},
       {"fn", v.fn},
       {"precision", v.precision()},
       {"recall", v.recall()},
       {"f1", v.f1()}};
}

void to_json(json& j, const DetectionReport& v) {
  j = {{"sample_id", v.sample_id}, {"tp", v.tp},           {"fp", v.fp},
       {"fn", v.fn},               {"precision", v.precision()}, {"recall", v.recall()},
       {"f1", v.f1()},             {"bins", v.bins}};
}

}  // namespace scatterfield
