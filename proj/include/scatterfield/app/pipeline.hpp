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

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "scatterfield/app/run_config.hpp"
#include "scatterfield/lightfield.hpp"
#include "scatterfield/manifest.hpp"
#include "scatterfield/metrics.hpp"
#include "scatterfield/scatter_sim.hpp"

namespace scatterfield::app {

/// Line-oriented key=value log sink.
class Logger {
 public:
  explicit Logger(std::ostream& out) : out_(&out) {}
  void log(std::string_view event, std::initializer_list<std::pair<std::string_view, std::string>> fields);

 private:
  std::ostream* out_;
  std::mutex mutex_;
};

std::string format_number(double v);

struct SampleSeeds {
  std::uint64_t volume = 0;
  std::uint64_t background = 0;
  std::uint64_t noise = 0;
  std::uint64_t sbr = 0;

  std::map<std::string, std::uint64_t> as_map() const;
};

SampleSeeds sample_seeds(std::uint64_t run_seed, std::size_t index);
std::string sample_id(std::size_t index);

/// Everything that is shared across samples of one run.
struct Simulator {
  RunConfig config;
  ViewGeometry geometry;
  PsfStack psf;
  FreeSpaceRenderer renderer;

  explicit Simulator(RunConfig cfg);
};

PsfStack make_psf(const RunConfig& cfg);

/// Synthesizes from `seed`, redrawing with derived seeds while the volume is
/// empty. The recipe seed of the returned volume's draw is written to `used`.
Volume draw_volume(VolumeRecipe recipe, std::uint64_t seed, std::uint64_t* used = nullptr);

SimulationRequest make_request(const RunConfig& cfg, const SampleSeeds& seeds, double sbr,
                               std::optional<double> ls_um);

/// Views as a (c, y, x) grid and back.
Grid3 stack_views(const ViewStack& views);
ViewStack views_from_grid(const Grid3& grid, const ViewGeometry& geometry);

struct GeneratedSample {
  std::string id;
  double sbr = 0.0;
  std::optional<double> ls_um;
  SampleSeeds seeds;
  SimulationResult sim;
  ViewStack views;
  RefocusedVolume refocused;
};

/// Draws the volume (redrawing empty ones with derived seeds), simulates and
/// derives the network inputs. Without overrides the SBR is uniform in
/// [sbr_min, sbr_max] and ls cycles through config.ls_um.
GeneratedSample generate_sample(const Simulator& sim, std::size_t index, std::optional<double> sbr = std::nullopt,
                                std::optional<double> ls_um = std::nullopt);

void write_sample(const std::filesystem::path& dir, const GeneratedSample& sample, const Simulator& sim);

void write_volume(const std::filesystem::path& path, const Volume& volume, const std::string& id = {});
Volume read_volume(const std::filesystem::path& path, const std::filesystem::path& emitters_csv = {});
GridSpec grid_from_header(const StackHeader& header);

/// Generates cfg.n samples into `dir`, echoes the config and writes the manifest.
/// sbr/ls overrides apply to every sample (used for fixed test cells).
Manifest generate_dataset(const RunConfig& cfg, const std::filesystem::path& dir, Logger& log,
                          std::optional<double> sbr = std::nullopt, std::optional<double> ls_um = std::nullopt);

/// Prediction file for a sample id: <dir>/<id>_prediction.sbrb.
std::filesystem::path prediction_path(const std::filesystem::path& dir, const std::string& id);

/// Runs the non-learned baseline on every sample in the manifest.
void write_baseline_predictions(const std::filesystem::path& manifest_path, const std::filesystem::path& pred_dir,
                                const RunConfig& cfg, Logger& log);

struct Evaluation {
  std::vector<DetectionReport> reports;
  std::vector<std::optional<double>> ls_um;  // per report
  std::vector<double> sbr;                   // per report
  std::vector<double> surface_z_um;          // per report
};

/// Throws Error(data) listing every sample id without a prediction.
Evaluation evaluate_predictions(const std::filesystem::path& manifest_path, const std::filesystem::path& pred_dir,
                                const MatchConfig& match);

}  // namespace scatterfield::app
