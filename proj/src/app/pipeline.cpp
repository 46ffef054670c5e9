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

#include "scatterfield/app/pipeline.hpp"

#include <omp.h>

#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "scatterfield/baseline_bgr.hpp"
#include "scatterfield/config_json.hpp"
#include "scatterfield/dataset_io.hpp"
#include "scatterfield/error.hpp"
#include "scatterfield/rng.hpp"

namespace scatterfield::app {

namespace fs = std::filesystem;

void Logger::log(std::string_view event, std::initializer_list<std::pair<std::string_view, std::string>> fields) {
  std::ostringstream line;
  line << "event=" << event;
  for (const auto& [k, v] : fields) line << ' ' << k << '=' << v;
  line << '\n';
  std::lock_guard lock(mutex_);
  *out_ << line.str() << std::flush;
}

std::string format_number(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

std::map<std::string, std::uint64_t> SampleSeeds::as_map() const {
  return {{"volume", volume}, {"background", background}, {"noise", noise}, {"sbr", sbr}};
}

SampleSeeds sample_seeds(std::uint64_t run_seed, std::size_t index) {
  const auto i = static_cast<std::uint64_t>(index);
  return {derive_seed(run_seed, {i, 0}), derive_seed(run_seed, {i, 1}), derive_seed(run_seed, {i, 2}),
          derive_seed(run_seed, {i, 3})};
}

std::string sample_id(std::size_t index) {
  std::ostringstream s;
  s << 's' << std::setw(5) << std::setfill('0') << index;
  return s.str();
}

PsfStack make_psf(const RunConfig& cfg) {
  if (!cfg.psf_path.empty()) return load_psf_stack(cfg.psf_path, cfg.volume.grid.planes);
  return synthesize_psf_stack(cfg.psf, cfg.geometry(), cfg.z_planes());
}

Simulator::Simulator(RunConfig cfg)
    : config((cfg.validate(), std::move(cfg))),
      geometry(config.geometry()),
      psf(make_psf(config)),
      renderer(psf, {config.volume.grid.rows, config.volume.grid.cols}) {
  require(psf.kernel_shape() == geometry.sensor, ErrorKind::shape_mismatch,
          "PSF kernels must have the sensor shape");
}

Volume draw_volume(VolumeRecipe recipe, std::uint64_t seed, std::uint64_t* used) {
  // Empty draws carry no signal to calibrate against.
  for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
    recipe.seed = attempt == 0 ? seed : derive_seed(seed, {attempt});
    Volume volume = synthesize_volume(recipe);
    if (!volume.emitters.empty()) {
      if (used) *used = recipe.seed;
      return volume;
    }
  }
  fail(ErrorKind::data, "volume recipe keeps producing empty volumes");
}

SimulationRequest make_request(const RunConfig& cfg, const SampleSeeds& seeds, double sbr,
                               std::optional<double> ls_um) {
  SimulationRequest req;
  req.sbr_target = sbr;
  req.background = cfg.background;
  req.background.seed = seeds.background;
  req.clip = cfg.clip;
  if (cfg.noise) req.noise = sample_noise_params(seeds.noise);
  if (ls_um) req.attenuation = AttenuationModel{*ls_um, cfg.surface_z()};
  return req;
}

GeneratedSample generate_sample(const Simulator& sim, std::size_t index, std::optional<double> sbr,
                                std::optional<double> ls_um) {
  const RunConfig& cfg = sim.config;
  GeneratedSample out;
  out.id = sample_id(index);
  out.seeds = sample_seeds(cfg.seed, index);
  if (sbr) {
    out.sbr = *sbr;
  } else {
    const double u = static_cast<double>(splitmix64(out.seeds.sbr) >> 11) * 0x1.0p-53;
    out.sbr = cfg.sbr_min + u * (cfg.sbr_max - cfg.sbr_min);
  }
  out.ls_um = ls_um;
  if (!ls_um && !cfg.ls_um.empty()) out.ls_um = cfg.ls_um[index % cfg.ls_um.size()];

  const SimulationRequest req = make_request(cfg, out.seeds, out.sbr, out.ls_um);
  const Volume volume = draw_volume(cfg.volume, out.seeds.volume, &out.seeds.volume);
  out.sim = simulate_pair(volume, sim.renderer, sim.geometry, req);
  std::map<std::string, std::uint64_t> seeds = out.seeds.as_map();
  for (Measurement* m : {&out.sim.measurement, &out.sim.clean, &out.sim.free_space})
    for (const auto& [k, v] : seeds) m->meta.seeds[k] = v;

  out.views = extract_views(out.sim.measurement.data, sim.geometry);
  out.refocused = refocus(out.views, cfg.z_planes());
  return out;
}

namespace {

Json measurement_meta(const Measurement& m, const std::string& id) {
  Json meta = m.meta;
  meta["kind"] = to_string(m.kind);
  meta["sample_id"] = id;
  return meta;
}

}  // namespace

Grid3 stack_views(const ViewStack& views) {
  const Shape2 s = views.views.front().shape();
  Grid3 g(views.views.size(), s.rows, s.cols);
  for (std::size_t i = 0; i < views.views.size(); ++i)
    std::copy(views.views[i].values().begin(), views.views[i].values().end(), g.plane(i).begin());
  return g;
}

ViewStack views_from_grid(const Grid3& grid, const ViewGeometry& geometry) {
  require(grid.planes() == kViewCount, ErrorKind::shape_mismatch, "view stack must hold 9 views");
  require(grid.rows() == geometry.view_size && grid.cols() == geometry.view_size, ErrorKind::shape_mismatch,
          "view size differs from the configured view_size");
  ViewStack v;
  v.geometry = geometry;
  for (std::size_t i = 0; i < kViewCount; ++i) v.views.push_back(grid.plane_image(i));
  return v;
}

void write_volume(const fs::path& path, const Volume& volume, const std::string& id) {
  Json meta = {{"kind", "volume"}, {"grid", volume.grid}, {"emitters", volume.emitters.size()}};
  if (!id.empty()) meta["sample_id"] = id;
  write_stack(path, stack_from_grid(volume.data, "z,y,x", volume.grid.pitch_xy_um, volume.grid.z0_um,
                                    volume.grid.pitch_z_um, meta));
}

GridSpec grid_from_header(const StackHeader& header) {
  require(header.shape.size() == 3, ErrorKind::format, "volume stack must be 3D");
  GridSpec g;
  if (header.meta.contains("grid")) from_json(header.meta.at("grid"), g);
  g.planes = header.shape[0];
  g.rows = header.shape[1];
  g.cols = header.shape[2];
  if (header.pixel_pitch_um > 0.0) g.pitch_xy_um = header.pixel_pitch_um;
  if (header.dz_um > 0.0) g.pitch_z_um = header.dz_um;
  g.z0_um = header.z0_um;
  return g;
}

Volume read_volume(const fs::path& path, const fs::path& emitters_csv) {
  const Stack s = read_stack(path);
  Volume v;
  v.grid = grid_from_header(s.header);
  v.data = grid_from_stack(s);
  if (!emitters_csv.empty()) v.emitters = read_emitters_csv(emitters_csv);
  return v;
}

void write_sample(const fs::path& dir, const GeneratedSample& sample, const Simulator& sim) {
  const SampleFiles f = SampleFiles::for_id(sample.id);
  const double pitch = sim.psf.pixel_pitch_um;
  write_stack(dir / f.measurement, stack_from_image(sample.sim.measurement.data, pitch,
                                                    measurement_meta(sample.sim.measurement, sample.id)));
  write_stack(dir / f.clean, stack_from_image(sample.sim.clean.data, pitch, measurement_meta(sample.sim.clean, sample.id)));
  write_stack(dir / f.free_space,
              stack_from_image(sample.sim.free_space.data, pitch, measurement_meta(sample.sim.free_space, sample.id)));
  Json view_meta = {{"kind", "views"}, {"sample_id", sample.id}, {"geometry", sim.geometry}};
  write_stack(dir / f.views, stack_from_grid(stack_views(sample.views), "c,y,x", pitch, 0.0, 0.0, view_meta));
  const GridSpec& g = sim.config.volume.grid;
  Json refocus_meta = {{"kind", "refocus"}, {"sample_id", sample.id}};
  write_stack(dir / f.refocus,
              stack_from_grid(sample.refocused.planes, "z,y,x", g.pitch_xy_um, g.z0_um, g.pitch_z_um, refocus_meta));
  write_volume(dir / f.volume, sample.sim.ground_truth, sample.id);
  write_emitters_csv(dir / f.emitters, sample.sim.ground_truth.emitters);
}

Manifest generate_dataset(const RunConfig& cfg, const fs::path& dir, Logger& log, std::optional<double> sbr,
                          std::optional<double> ls_um) {
  fs::create_directories(dir);
  const Simulator sim(cfg);
  {
    std::ofstream echo(dir / "config.json", std::ios::binary);
    echo << cfg.to_json().dump(2) << '\n';
    require(static_cast<bool>(echo), ErrorKind::io, "cannot write " + (dir / "config.json").string());
  }
  log.log("generate_start", {{"dir", dir.string()},
                             {"n", std::to_string(cfg.n)},
                             {"preset", to_string(cfg.preset)},
                             {"render", sim.renderer.method() == RenderMethod::direct ? "direct" : "fft"}});

  const long n = static_cast<long>(cfg.n);
  std::vector<std::exception_ptr> errors(cfg.n);
  const int threads = cfg.jobs > 0 ? cfg.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long i = 0; i < n; ++i) {
    try {
      const GeneratedSample s = generate_sample(sim, static_cast<std::size_t>(i), sbr, ls_um);
      write_sample(dir, s, sim);
      log.log("sample_done", {{"id", s.id},
                              {"sbr", format_number(s.sbr)},
                              {"ls_um", s.ls_um ? format_number(*s.ls_um) : "none"},
                              {"emitters", std::to_string(s.sim.ground_truth.emitters.size())},
                              {"alpha", format_number(s.sim.clean.meta.alpha)}});
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  SplitFractions fractions = cfg.split;
  if (sbr || ls_um || !cfg.ls_um.empty()) fractions = {0.0, 0.0, 1.0};
  Manifest m = build_manifest(dir, cfg.seed, fractions);
  write_manifest(dir, m);
  log.log("generate_done", {{"dir", dir.string()}, {"samples", std::to_string(m.samples.size())}});
  return m;
}

fs::path prediction_path(const fs::path& dir, const std::string& id) { return dir / (id + "_prediction.sbrb"); }

void write_baseline_predictions(const fs::path& manifest_path, const fs::path& pred_dir, const RunConfig& cfg,
                                Logger& log) {
  const Manifest m = read_manifest(manifest_path);
  const fs::path base = manifest_path.parent_path();
  fs::create_directories(pred_dir);
  const ViewGeometry geometry = cfg.geometry();
  BaselinePredictorConfig bcfg;
  bcfg.bgr = cfg.bgr;
  bcfg.relative_floor = cfg.baseline_floor;
  const long n = static_cast<long>(m.samples.size());
  std::vector<std::exception_ptr> errors(m.samples.size());
  const int threads = cfg.jobs > 0 ? cfg.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long i = 0; i < n; ++i) {
    try {
      const SampleRecord& r = m.samples[static_cast<std::size_t>(i)];
      const Stack meas = read_stack(base / r.measurement_path);
      const Stack vol = read_stack(base / r.volume_path);
      const GridSpec grid = grid_from_header(vol.header);
      const Grid3 pred = baseline_predict(image_from_stack(meas), geometry, grid.plane_z_values(), bcfg);
      write_stack(prediction_path(pred_dir, r.id),
                  stack_from_grid(pred, "z,y,x", grid.pitch_xy_um, grid.z0_um, grid.pitch_z_um,
                                  {{"kind", "prediction"}, {"predictor", "baseline_bgr"}, {"sample_id", r.id}}));
      log.log("baseline_done", {{"id", r.id}});
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

Evaluation evaluate_predictions(const fs::path& manifest_path, const fs::path& pred_dir, const MatchConfig& match) {
  match.validate();
  const Manifest m = read_manifest(manifest_path);
  const fs::path base = manifest_path.parent_path();
  std::ostringstream missing;
  for (const SampleRecord& r : m.samples)
    if (!fs::exists(prediction_path(pred_dir, r.id))) missing << ' ' << r.id;
  if (!missing.str().empty())
    fail(ErrorKind::data, "no prediction in " + pred_dir.string() + " for sample ids:" + missing.str());

  Evaluation ev;
  ev.reports.resize(m.samples.size());
  ev.ls_um.resize(m.samples.size());
  ev.sbr.resize(m.samples.size());
  ev.surface_z_um.resize(m.samples.size());
  const long n = static_cast<long>(m.samples.size());
  std::vector<std::exception_ptr> errors(m.samples.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      const SampleRecord& r = m.samples[k];
      const Stack vol = read_stack(base / r.volume_path);
      const GridSpec grid = grid_from_header(vol.header);
      const Stack pred = read_stack(prediction_path(pred_dir, r.id));
      const Grid3 p = grid_from_stack(pred);
      if (p.planes() != grid.planes || p.rows() != grid.rows || p.cols() != grid.cols)
        fail(ErrorKind::shape_mismatch, r.id + ": prediction shape differs from the ground-truth volume");
      const std::vector<Emitter> truth = read_emitters_csv(base / r.emitters_csv);
      ev.reports[k] = evaluate_volume(p, truth, grid, match, r.id);
      ev.ls_um[k] = r.ls_um;
      ev.sbr[k] = r.sbr;
      ev.surface_z_um[k] = r.extra.value("surface_z_um", grid.z0_um);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return ev;
}

}  // namespace scatterfield::app
