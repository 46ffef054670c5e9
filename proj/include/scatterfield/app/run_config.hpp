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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "scatterfield/baseline_bgr.hpp"
#include "scatterfield/manifest.hpp"
#include "scatterfield/metrics.hpp"
#include "scatterfield/optics.hpp"
#include "scatterfield/scatter_sim.hpp"
#include "scatterfield/volume_synth.hpp"

namespace scatterfield::app {

enum class Preset { desk, paper };

std::string to_string(Preset p);
Preset preset_from_string(const std::string& s);

struct RunConfig {
  Preset preset = Preset::desk;
  VolumeRecipe volume;
  SyntheticPsfParams psf;
  std::string psf_path;  // measured stack; empty selects the synthetic PSF
  Shape2 sensor;
  std::size_t view_size = 128;
  BackgroundParams background;
  double sbr_min = 1.1;
  double sbr_max = 3.0;
  bool noise = true;
  bool clip = false;
  std::vector<double> ls_um;            // empty: training data without attenuation
  std::optional<double> surface_z_um;   // default: first plane
  std::size_t n = 10;
  std::uint64_t seed = 0;
  int jobs = 0;                         // 0: OpenMP default
  std::string output_dir = "out";
  MatchConfig match;
  BgrParams bgr;
  double baseline_floor = 0.5;
  SplitFractions split;

  static RunConfig defaults(Preset preset);

  /// Throws Error(invalid_argument) describing the first inconsistency.
  void validate() const;
  double surface_z() const noexcept;
  ViewGeometry geometry() const;
  std::vector<double> z_planes() const { return volume.grid.plane_z_values(); }

  nlohmann::json to_json() const;
  /// Starts from the preset named in `j` (default desk) and overrides present keys.
  static RunConfig from_json(const nlohmann::json& j);
};

}  // namespace scatterfield::app
