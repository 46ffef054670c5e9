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

#include "scatterfield/app/run_config.hpp"

#include "scatterfield/config_json.hpp"
#include "scatterfield/error.hpp"

namespace scatterfield::app {

using nlohmann::json;

std::string to_string(Preset p) { return p == Preset::desk ? "desk" : "paper"; }

Preset preset_from_string(const std::string& s) {
  if (s == "desk") return Preset::desk;
  if (s == "paper") return Preset::paper;
  fail(ErrorKind::invalid_argument, "unknown preset \"" + s + "\" (expected desk or paper)");
}

RunConfig RunConfig::defaults(Preset preset) {
  RunConfig c;
  c.preset = preset;
  if (preset == Preset::desk) {
    c.volume.grid = {8, 128, 128, 4.15, 25.0, -50.0};
    c.view_size = 128;
    c.sensor = {416, 416};
    c.n = 10;
  } else {
    c.volume.grid = {24, 512, 512, 4.15, 25.0, -200.0};
    c.view_size = 512;
    c.sensor = {2076, 3088};
    c.n = 500;
  }
  return c;
}

void RunConfig::validate() const {
  volume.validate();
  psf.validate();
  background.validate();
  match.validate();
  bgr.validate();
  split.validate();
  require(sbr_min >= 1.0 && sbr_min <= sbr_max, ErrorKind::invalid_argument,
          "config: need 1 <= sbr_min <= sbr_max");
  require(n > 0, ErrorKind::invalid_argument, "config: sample count must be positive");
  require(jobs >= 0, ErrorKind::invalid_argument, "config: jobs must be >= 0");
  for (double ls : ls_um) require(ls > 0.0, ErrorKind::invalid_argument, "config: scattering lengths must be positive");
  require(baseline_floor >= 0.0 && baseline_floor < 1.0, ErrorKind::invalid_argument,
          "config: baseline_floor must lie in [0, 1)");
  require(volume.grid.rows == view_size && volume.grid.cols == view_size, ErrorKind::invalid_argument,
          "config: volume rows/cols must equal view_size (one voxel per sensor pixel)");
  geometry();
}

double RunConfig::surface_z() const noexcept { return surface_z_um.value_or(volume.grid.z0_um); }

ViewGeometry RunConfig::geometry() const {
  return with_parallax(default_view_geometry(sensor, view_size), psf);
}

json RunConfig::to_json() const {
  json j = {{"preset", app::to_string(preset)},
            {"volume", volume},
            {"psf", psf},
            {"psf_path", psf_path},
            {"sensor", {sensor.rows, sensor.cols}},
            {"view_size", view_size},
            {"background", background},
            {"sbr_min", sbr_min},
            {"sbr_max", sbr_max},
            {"noise", noise},
            {"clip", clip},
            {"ls_um", ls_um},
            {"surface_z_um", surface_z_um ? json(*surface_z_um) : json(nullptr)},
            {"n", n},
            {"seed", seed},
            {"jobs", jobs},
            {"output_dir", output_dir},
            {"match", match},
            {"bgr", bgr},
            {"baseline_floor", baseline_floor},
            {"split", {{"train", split.train}, {"val", split.val}, {"test", split.test}}}};
  return j;
}

RunConfig RunConfig::from_json(const json& j) {
  reject_unknown_keys(j,
                      {"preset", "volume", "psf", "psf_path", "sensor", "view_size", "background", "sbr_min",
                       "sbr_max", "noise", "clip", "ls_um", "surface_z_um", "n", "seed", "jobs", "output_dir",
                       "match", "bgr", "baseline_floor", "split"},
                      "config");
  RunConfig c = defaults(preset_from_string(j.value("preset", std::string("desk"))));
  try {
    if (j.contains("volume")) j.at("volume").get_to(c.volume);
    if (j.contains("psf")) j.at("psf").get_to(c.psf);
    if (j.contains("psf_path")) c.psf_path = j.at("psf_path").get<std::string>();
    if (j.contains("sensor")) {
      const auto s = j.at("sensor").get<std::array<std::size_t, 2>>();
      c.sensor = {s[0], s[1]};
    }
    if (j.contains("view_size")) c.view_size = j.at("view_size").get<std::size_t>();
    if (j.contains("background")) j.at("background").get_to(c.background);
    if (j.contains("sbr_min")) c.sbr_min = j.at("sbr_min").get<double>();
    if (j.contains("sbr_max")) c.sbr_max = j.at("sbr_max").get<double>();
    if (j.contains("noise")) c.noise = j.at("noise").get<bool>();
    if (j.contains("clip")) c.clip = j.at("clip").get<bool>();
    if (j.contains("ls_um")) c.ls_um = j.at("ls_um").get<std::vector<double>>();
    if (j.contains("surface_z_um") && !j.at("surface_z_um").is_null())
      c.surface_z_um = j.at("surface_z_um").get<double>();
    if (j.contains("n")) c.n = j.at("n").get<std::size_t>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("jobs")) c.jobs = j.at("jobs").get<int>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("match")) j.at("match").get_to(c.match);
    if (j.contains("bgr")) j.at("bgr").get_to(c.bgr);
    if (j.contains("baseline_floor")) c.baseline_floor = j.at("baseline_floor").get<double>();
    if (j.contains("split")) {
      const json& s = j.at("split");
      c.split.train = s.value("train", c.split.train);
      c.split.val = s.value("val", c.split.val);
      c.split.test = s.value("test", c.split.test);
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::invalid_argument, std::string("config: ") + e.what());
  }
  return c;
}

}  // namespace scatterfield::app
