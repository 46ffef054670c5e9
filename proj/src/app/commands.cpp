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

#include "scatterfield/app/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "scatterfield/app/pipeline.hpp"
#include "scatterfield/app/run_config.hpp"
#include "scatterfield/baseline_bgr.hpp"
#include "scatterfield/config_json.hpp"
#include "scatterfield/dataset_io.hpp"
#include "scatterfield/error.hpp"
#include "scatterfield/rng.hpp"

namespace scatterfield::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Flags shared by every command that builds a RunConfig.
struct ConfigFlags {
  std::string preset;
  std::string config_path;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double sbr_min = 0.0;
  double sbr_max = 0.0;
  std::vector<double> ls;
  bool no_noise = false;
  bool clip = false;
  bool shared_bg = false;
  int jobs = 0;
  std::string psf_path;

  CLI::Option* preset_opt = nullptr;
  CLI::Option* n_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* sbr_min_opt = nullptr;
  CLI::Option* sbr_max_opt = nullptr;
  CLI::Option* jobs_opt = nullptr;

  void attach(CLI::App* cmd) {
    preset_opt = cmd->add_option("--preset", preset, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));
    cmd->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    n_opt = cmd->add_option("--n", n, "number of samples");
    seed_opt = cmd->add_option("--seed", seed, "run seed (fallback: SCATTERFIELD_SEED)");
    sbr_min_opt = cmd->add_option("--sbr-min", sbr_min, "lowest training SBR");
    sbr_max_opt = cmd->add_option("--sbr-max", sbr_max, "highest training SBR");
    cmd->add_option("--ls", ls, "scattering lengths in um")->delimiter(',');
    cmd->add_flag("--no-noise", no_noise, "skip the Poisson-Gaussian noise stage");
    cmd->add_flag("--clip", clip, "clip noisy measurements at zero");
    cmd->add_flag("--shared-bg", shared_bg, "replicate one background canvas across views");
    jobs_opt = cmd->add_option("--jobs", jobs, "sample-level worker bound (0: all cores)");
    cmd->add_option("--psf", psf_path, "measured PSF stack")->check(CLI::ExistingFile);
  }

  RunConfig resolve(std::ostream& err) const {
    json j = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path, std::ios::binary);
      j = json::parse(in, nullptr, false);
      if (j.is_discarded() || !j.is_object())
        fail(ErrorKind::invalid_argument, config_path + ": config must be a JSON object");
    }
    if (preset_opt->count()) j["preset"] = preset;
    const bool config_has_seed = j.contains("seed");
    RunConfig cfg = RunConfig::from_json(j);
    if (seed_opt->count()) {
      cfg.seed = seed;
    } else if (!config_has_seed) {
      if (const char* env = std::getenv("SCATTERFIELD_SEED"); env && *env) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        require(*end == '\0', ErrorKind::invalid_argument, std::string("SCATTERFIELD_SEED is not an integer: ") + env);
        cfg.seed = v;
      }
    }
    if (n_opt->count()) cfg.n = n;
    if (sbr_min_opt->count()) cfg.sbr_min = sbr_min;
    if (sbr_max_opt->count()) cfg.sbr_max = sbr_max;
    if (!ls.empty()) cfg.ls_um = ls;
    if (no_noise) cfg.noise = false;
    if (clip) cfg.clip = true;
    if (shared_bg) cfg.background.shared = true;
    if (jobs_opt->count()) cfg.jobs = jobs;
    if (!psf_path.empty()) cfg.psf_path = psf_path;
    if (cfg.preset == Preset::paper)
      err << "event=warning message=\"paper preset: 2076x3088 sensor, 24 planes, about 220 MB per sample\"\n";
    cfg.validate();
    return cfg;
  }
};

// Matching flags for evaluate and sweep-sbr.
struct MatchFlags {
  MatchConfig match;
  std::string matcher = "hungarian";

  void attach(CLI::App* cmd) {
    cmd->add_option("--threshold", match.intensity_threshold, "detection threshold")->capture_default_str();
    cmd->add_option("--lateral-tol", match.lateral_tol_um, "lateral match tolerance (um)")->capture_default_str();
    cmd->add_option("--axial-tol", match.axial_tol_um, "axial match tolerance (um)")->capture_default_str();
    cmd->add_option("--matcher", matcher, "hungarian or greedy")->check(CLI::IsMember({"hungarian", "greedy"}));
  }

  MatchConfig resolve() const {
    MatchConfig m = match;
    m.matcher = matcher_from_string(matcher);
    m.validate();
    return m;
  }
};

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::io, "cannot open " + path.string() + " for writing");
  out << text;
  require(static_cast<bool>(out), ErrorKind::io, "write failed: " + path.string());
}

void make_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

// Datasets echo their config; commands reading a dataset reuse it unless told otherwise.
RunConfig config_for_dataset(const ConfigFlags& flags, const fs::path& manifest, std::ostream& err) {
  const fs::path echo = manifest.parent_path() / "config.json";
  if (flags.config_path.empty() && fs::exists(echo)) {
    ConfigFlags f = flags;
    f.config_path = echo.string();
    return f.resolve(err);
  }
  return flags.resolve(err);
}

std::string bucket_label(double sbr, double width) {
  const double lo = std::floor(sbr / width) * width;
  return format_number(lo) + "-" + format_number(lo + width);
}

struct Totals {
  std::size_t tp = 0, fp = 0, fn = 0;
  double mean_f1 = 0.0;
  double stderr_f1 = 0.0;
  std::size_t samples = 0;
};

Totals totals(std::span<const DetectionReport> reports) {
  Totals t;
  std::vector<double> f1;
  for (const DetectionReport& r : reports) {
    t.tp += r.tp;
    t.fp += r.fp;
    t.fn += r.fn;
    f1.push_back(r.f1());
  }
  t.samples = f1.size();
  if (f1.empty()) return t;
  for (double v : f1) t.mean_f1 += v;
  t.mean_f1 /= static_cast<double>(f1.size());
  if (f1.size() > 1) {
    double ss = 0.0;
    for (double v : f1) ss += (v - t.mean_f1) * (v - t.mean_f1);
    t.stderr_f1 = std::sqrt(ss / static_cast<double>(f1.size() - 1)) / std::sqrt(static_cast<double>(f1.size()));
  }
  return t;
}

double surface_of(const Evaluation& ev) { return ev.surface_z_um.empty() ? 0.0 : ev.surface_z_um.front(); }

// Writes reports.json plus depth curves for all samples, each scattering length and each SBR bucket.
json write_evaluation(const Evaluation& ev, const fs::path& out_dir, double bucket_width) {
  fs::create_directories(out_dir);
  const double surface = surface_of(ev);
  const Totals all = totals(ev.reports);
  json j;
  j["samples"] = json::array();
  for (std::size_t i = 0; i < ev.reports.size(); ++i) {
    json r = ev.reports[i];
    r["sbr"] = ev.sbr[i];
    r["ls_um"] = ev.ls_um[i] ? json(*ev.ls_um[i]) : json(nullptr);
    j["samples"].push_back(std::move(r));
  }
  j["aggregate"] = {{"samples", all.samples},
                    {"tp", all.tp},
                    {"fp", all.fp},
                    {"fn", all.fn},
                    {"precision", precision_of(all.tp, all.fp)},
                    {"recall", recall_of(all.tp, all.fn)},
                    {"f1", f1_of(precision_of(all.tp, all.fp), recall_of(all.tp, all.fn))},
                    {"mean_f1", all.mean_f1},
                    {"stderr_f1", all.stderr_f1}};

  std::optional<double> common_ls;
  bool uniform_ls = !ev.ls_um.empty();
  for (const auto& ls : ev.ls_um) uniform_ls = uniform_ls && ls == ev.ls_um.front();
  if (uniform_ls) common_ls = ev.ls_um.front();
  write_curve_csv(out_dir / "f1_depth_all.csv", f1_vs_depth(ev.reports, common_ls, surface));

  std::map<double, std::vector<DetectionReport>> by_ls;
  std::map<double, std::vector<DetectionReport>> by_sbr;
  for (std::size_t i = 0; i < ev.reports.size(); ++i) {
    if (ev.ls_um[i]) by_ls[*ev.ls_um[i]].push_back(ev.reports[i]);
    by_sbr[std::floor(ev.sbr[i] / bucket_width) * bucket_width].push_back(ev.reports[i]);
  }
  json files = json::array({"f1_depth_all.csv"});
  for (const auto& [ls, reports] : by_ls) {
    const std::string name = "f1_depth_ls" + format_number(ls) + ".csv";
    write_curve_csv(out_dir / name, f1_vs_depth(reports, ls, surface));
    files.push_back(name);
  }
  for (const auto& [lo, reports] : by_sbr) {
    const std::string name = "f1_depth_sbr" + bucket_label(lo, bucket_width) + ".csv";
    write_curve_csv(out_dir / name, f1_vs_depth(reports, common_ls, surface));
    files.push_back(name);
  }
  j["curves"] = files;
  write_text(out_dir / "reports.json", j.dump(2) + "\n");
  return j["aggregate"];
}

// --- commands ------------------------------------------------------------------------

int cmd_generate(const ConfigFlags& flags, const std::string& out_dir, std::ostream& out, std::ostream& err) {
  RunConfig cfg = flags.resolve(err);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  Logger log(out);
  generate_dataset(cfg, cfg.output_dir, log);
  return kExitOk;
}

int cmd_gen_volumes(const ConfigFlags& flags, const std::string& out_dir, std::ostream& out, std::ostream& err) {
  RunConfig cfg = flags.resolve(err);
  const fs::path dir = out_dir.empty() ? fs::path(cfg.output_dir) : fs::path(out_dir);
  fs::create_directories(dir);
  Logger log(out);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const std::string id = sample_id(i);
    std::uint64_t used = 0;
    const Volume v = draw_volume(cfg.volume, sample_seeds(cfg.seed, i).volume, &used);
    const SampleFiles f = SampleFiles::for_id(id);
    write_volume(dir / f.volume, v, id);
    write_emitters_csv(dir / f.emitters, v.emitters);
    log.log("volume_done", {{"id", id}, {"emitters", std::to_string(v.emitters.size())}, {"seed", std::to_string(used)}});
  }
  return kExitOk;
}

int cmd_gen_psf(const ConfigFlags& flags, const std::string& out_path, const std::string& tiff, std::ostream& out,
                std::ostream& err) {
  const RunConfig cfg = flags.resolve(err);
  const PsfStack psf = make_psf(cfg);
  make_parent(out_path);
  save_psf_stack(out_path, psf);
  if (!tiff.empty()) {
    make_parent(tiff);
    export_tiff(tiff, read_stack(out_path));
  }
  Logger(out).log("psf_done", {{"path", out_path},
                               {"planes", std::to_string(psf.planes())},
                               {"rows", std::to_string(psf.kernel_shape().rows)},
                               {"cols", std::to_string(psf.kernel_shape().cols)}});
  return kExitOk;
}

struct SimulateFlags {
  std::string volume;
  std::string emitters;
  std::string out;
  std::string clean_out;
  std::string free_space_out;
  double sbr = 2.0;
};

int cmd_simulate(const ConfigFlags& flags, const SimulateFlags& sf, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = flags.resolve(err);
  if (sf.sbr <= 1.0) err << "event=warning message=\"SBR 1 gives alpha = 0; the measurement carries no signal\"\n";
  Volume volume = read_volume(sf.volume, sf.emitters);
  const GridSpec& g = cfg.volume.grid;
  require(volume.grid.planes == g.planes && volume.grid.rows == g.rows && volume.grid.cols == g.cols,
          ErrorKind::shape_mismatch, sf.volume + ": volume shape differs from the configured grid");
  const Simulator sim(cfg);
  const std::optional<double> ls = cfg.ls_um.empty() ? std::nullopt : std::optional<double>(cfg.ls_um.front());
  const SampleSeeds seeds = sample_seeds(cfg.seed, 0);
  const SimulationResult r = simulate_pair(volume, sim.renderer, sim.geometry, make_request(cfg, seeds, sf.sbr, ls));
  const auto save = [&](const std::string& path, const Measurement& m) {
    if (path.empty()) return;
    make_parent(path);
    json meta = m.meta;
    meta["kind"] = to_string(m.kind);
    write_stack(path, stack_from_image(m.data, sim.psf.pixel_pitch_um, meta));
  };
  save(sf.out, r.measurement);
  save(sf.clean_out, r.clean);
  save(sf.free_space_out, r.free_space);
  Logger(out).log("simulate_done", {{"path", sf.out},
                                    {"sbr_target", format_number(sf.sbr)},
                                    {"sbr_realized", format_number(r.clean.meta.sbr_realized)},
                                    {"alpha", format_number(r.clean.meta.alpha)}});
  return kExitOk;
}

int cmd_views(const ConfigFlags& flags, const std::string& in, const std::string& out_path, std::ostream& out,
              std::ostream& err) {
  const RunConfig cfg = flags.resolve(err);
  const Stack s = read_stack(in);
  const ViewGeometry geometry = cfg.geometry();
  const ViewStack v = extract_views(image_from_stack(s), geometry);
  make_parent(out_path);
  write_stack(out_path, stack_from_grid(stack_views(v), "c,y,x", s.header.pixel_pitch_um, 0.0, 0.0,
                                        {{"kind", "views"}, {"geometry", geometry}}));
  Logger(out).log("views_done", {{"path", out_path}, {"views", std::to_string(v.views.size())}});
  return kExitOk;
}

int cmd_refocus(const ConfigFlags& flags, const std::string& in, const std::string& out_path, std::ostream& out,
                std::ostream& err) {
  const RunConfig cfg = flags.resolve(err);
  const Stack s = read_stack(in);
  const ViewGeometry geometry = cfg.geometry();
  // Accepts either a view stack or a raw measurement.
  const ViewStack v = s.header.shape.size() == 3 ? views_from_grid(grid_from_stack(s), geometry)
                                                 : extract_views(image_from_stack(s), geometry);
  const RefocusedVolume r = refocus(v, cfg.z_planes());
  const GridSpec& g = cfg.volume.grid;
  make_parent(out_path);
  write_stack(out_path, stack_from_grid(r.planes, "z,y,x", g.pitch_xy_um, g.z0_um, g.pitch_z_um, {{"kind", "refocus"}}));
  Logger(out).log("refocus_done", {{"path", out_path}, {"planes", std::to_string(r.planes.planes())}});
  return kExitOk;
}

int cmd_bgremove(const std::string& in, const std::string& out_path, const std::string& mode, int radius,
                 std::ostream& out) {
  BgrParams p;
  p.mode = bgr_mode_from_string(mode);
  p.structuring_radius = radius;
  p.validate();
  const Stack s = read_stack(in);
  const Image cleaned = remove_background(image_from_stack(s), p);
  json meta = s.header.meta;
  meta["bgr"] = p;
  make_parent(out_path);
  write_stack(out_path, stack_from_image(cleaned, s.header.pixel_pitch_um, meta));
  Logger(out).log("bgremove_done", {{"path", out_path}, {"mode", to_string(p.mode)}, {"radius", std::to_string(radius)}});
  return kExitOk;
}

int cmd_baseline(const ConfigFlags& flags, const std::string& manifest, const std::string& pred_dir,
                 std::ostream& out, std::ostream& err) {
  const RunConfig cfg = config_for_dataset(flags, manifest, err);
  Logger log(out);
  write_baseline_predictions(manifest, pred_dir, cfg, log);
  return kExitOk;
}

int cmd_evaluate(const std::string& manifest, const std::string& pred_dir, const std::string& out_dir,
                 const MatchFlags& mf, double bucket_width, std::ostream& out) {
  require(bucket_width > 0.0, ErrorKind::invalid_argument, "--sbr-bucket must be positive");
  const Evaluation ev = evaluate_predictions(manifest, pred_dir, mf.resolve());
  const json agg = write_evaluation(ev, out_dir, bucket_width);
  Logger(out).log("evaluate_done", {{"dir", out_dir},
                                    {"samples", std::to_string(ev.reports.size())},
                                    {"f1", format_number(agg.at("f1").get<double>())},
                                    {"mean_f1", format_number(agg.at("mean_f1").get<double>())}});
  return kExitOk;
}

int cmd_pca(const std::vector<std::string>& inputs, std::size_t per_image, std::uint64_t seed,
            const std::string& out_path, std::ostream& out) {
  require(!inputs.empty(), ErrorKind::invalid_argument, "pca: need at least one --input domain=path");
  std::vector<Image> images;
  std::vector<PatchSite> sites;
  for (const std::string& spec : inputs) {
    const auto eq = spec.find('=');
    require(eq != std::string::npos && eq > 0 && eq + 1 < spec.size(), ErrorKind::invalid_argument,
            "pca: --input expects domain=path, got \"" + spec + "\"");
    const std::string domain = spec.substr(0, eq);
    images.push_back(image_from_stack(read_stack(spec.substr(eq + 1))));
    const Image& img = images.back();
    const std::size_t half = kPatchSize / 2;
    require(img.rows() >= kPatchSize + 1 && img.cols() >= kPatchSize + 1, ErrorKind::shape_mismatch,
            "pca: image smaller than a patch: " + spec);
    std::uint64_t state = derive_seed(seed, {images.size()});
    for (std::size_t k = 0; k < per_image; ++k) {
      PatchSite site;
      site.image = images.size() - 1;
      site.row = static_cast<long>(half + uniform_below(state, img.rows() - 2 * half + 1));
      site.col = static_cast<long>(half + uniform_below(state, img.cols() - 2 * half + 1));
      site.domain = domain;
      sites.push_back(site);
    }
  }
  const std::vector<PcaRow> rows = pca_patches(images, sites);
  make_parent(out_path);
  write_pca_csv(out_path, rows);
  Logger(out).log("pca_done", {{"path", out_path}, {"patches", std::to_string(rows.size())}});
  return kExitOk;
}

struct SweepFlags {
  std::vector<double> sbr = {1.05, 1.25, 1.35, 2.0, 3.0};
  std::string pred_dir;
  std::string out = "sweep";
};

std::string cell_name(double sbr, double ls) { return "sbr" + format_number(sbr) + "_ls" + format_number(ls); }

int cmd_sweep(const ConfigFlags& flags, const SweepFlags& sw, const MatchFlags& mf, std::ostream& out,
              std::ostream& err) {
  RunConfig cfg = flags.resolve(err);
  const MatchConfig match = mf.resolve();
  std::vector<double> ls_list = cfg.ls_um.empty() ? std::vector<double>{80.0, 160.0, 320.0} : cfg.ls_um;
  if (!flags.n_opt->count() && flags.config_path.empty()) cfg.n = 25;
  cfg.ls_um.clear();
  for (double s : sw.sbr) {
    require(s >= 1.0, ErrorKind::invalid_argument, "sweep-sbr: SBR values must be >= 1");
    if (s == 1.0) err << "event=warning message=\"SBR 1 gives alpha = 0; the measurement carries no signal\"\n";
  }
  Logger log(out);
  const fs::path root = sw.out;
  fs::create_directories(root);
  std::ostringstream grid, summary;
  grid << "sbr,ls_um,z_um,z_over_ls,tp,fp,fn,precision,recall,f1,stderr\n";
  summary << "sbr,ls_um,samples,tp,fp,fn,precision,recall,f1,mean_f1,stderr\n";
  grid << std::setprecision(10);
  summary << std::setprecision(10);
  for (double s : sw.sbr) {
    for (double ls : ls_list) {
      const std::string name = cell_name(s, ls);
      const fs::path dir = root / name;
      generate_dataset(cfg, dir, log, s, ls);
      const fs::path manifest = dir / "manifest.json";
      fs::path preds;
      if (sw.pred_dir.empty()) {
        preds = dir / "predictions";
        write_baseline_predictions(manifest, preds, cfg, log);
      } else {
        preds = fs::path(sw.pred_dir) / name;
      }
      const Evaluation ev = evaluate_predictions(manifest, preds, match);
      write_evaluation(ev, dir / "report", 0.5);
      for (const CurveRow& r : f1_vs_depth(ev.reports, ls, surface_of(ev)))
        grid << s << ',' << ls << ',' << r.z_um << ',' << r.z_over_ls << ',' << r.tp << ',' << r.fp << ',' << r.fn
             << ',' << r.precision << ',' << r.recall << ',' << r.f1 << ',' << r.stderr_f1 << '\n';
      const Totals t = totals(ev.reports);
      const double p = precision_of(t.tp, t.fp), rc = recall_of(t.tp, t.fn);
      summary << s << ',' << ls << ',' << t.samples << ',' << t.tp << ',' << t.fp << ',' << t.fn << ',' << p << ','
              << rc << ',' << f1_of(p, rc) << ',' << t.mean_f1 << ',' << t.stderr_f1 << '\n';
      log.log("cell_done", {{"cell", name}, {"mean_f1", format_number(t.mean_f1)}, {"stderr", format_number(t.stderr_f1)}});
    }
  }
  write_text(root / "sweep_grid.csv", grid.str());
  write_text(root / "sweep_summary.csv", summary.str());
  log.log("sweep_done", {{"dir", root.string()}, {"cells", std::to_string(sw.sbr.size() * ls_list.size())}});
  return kExitOk;
}

int cmd_verify(const std::string& manifest, std::ostream& out, std::ostream& err) {
  const std::vector<std::string> problems = verify_dataset(manifest);
  for (const std::string& p : problems) err << "event=problem detail=\"" << p << "\"\n";
  Logger(out).log("verify_done", {{"manifest", manifest}, {"problems", std::to_string(problems.size())}});
  return problems.empty() ? kExitOk : kExitData;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::invalid_argument:
    case ErrorKind::invalid_recipe:
    case ErrorKind::geometry:
      return kExitUsage;
    default:
      return kExitData;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scattering-aware light-field dataset generation and evaluation", "scatterfield"};
  app.require_subcommand(1);

  std::string out_path, in_path, manifest, pred_dir, tiff;

  ConfigFlags gen_flags;
  auto* gen = app.add_subcommand("generate", "generate a complete dataset with manifest");
  gen_flags.attach(gen);
  gen->add_option("--out", out_path, "dataset directory");

  ConfigFlags vol_flags;
  auto* vols = app.add_subcommand("gen-volumes", "draw ground-truth volumes and emitter lists");
  vol_flags.attach(vols);
  vols->add_option("--out", out_path, "output directory");

  ConfigFlags psf_flags;
  auto* psf = app.add_subcommand("gen-psf", "write the synthetic PSF stack");
  psf_flags.attach(psf);
  psf->add_option("--out", out_path, "PSF stack path")->required();
  psf->add_option("--tiff", tiff, "also export as float32 TIFF");

  ConfigFlags sim_flags;
  SimulateFlags sf;
  auto* sim = app.add_subcommand("simulate", "simulate one measurement from a volume stack");
  sim_flags.attach(sim);
  sim->add_option("--volume", sf.volume, "volume stack")->required()->check(CLI::ExistingFile);
  sim->add_option("--emitters", sf.emitters, "emitter CSV for the volume")->check(CLI::ExistingFile);
  sim->add_option("--sbr", sf.sbr, "target SBR")->capture_default_str();
  sim->add_option("--out", sf.out, "measurement path")->required();
  sim->add_option("--clean-out", sf.clean_out, "noise-free scattering measurement path");
  sim->add_option("--free-space-out", sf.free_space_out, "free-space rendering path");

  ConfigFlags view_flags;
  auto* views = app.add_subcommand("views", "crop the nine views from a measurement");
  view_flags.attach(views);
  views->add_option("--in", in_path, "measurement stack")->required()->check(CLI::ExistingFile);
  views->add_option("--out", out_path, "view stack path")->required();

  ConfigFlags ref_flags;
  auto* ref = app.add_subcommand("refocus", "shift-and-add refocus onto the volume planes");
  ref_flags.attach(ref);
  ref->add_option("--in", in_path, "view stack or measurement")->required()->check(CLI::ExistingFile);
  ref->add_option("--out", out_path, "refocused stack path")->required();

  std::string bgr_mode = "opening";
  int bgr_radius = 15;
  auto* bgr = app.add_subcommand("bgremove", "remove smooth background from a measurement");
  bgr->add_option("--in", in_path, "measurement stack")->required()->check(CLI::ExistingFile);
  bgr->add_option("--out", out_path, "output stack")->required();
  bgr->add_option("--mode", bgr_mode, "opening or highpass")->capture_default_str();
  bgr->add_option("--radius", bgr_radius, "structuring radius in pixels")->capture_default_str();

  ConfigFlags base_flags;
  auto* base = app.add_subcommand("baseline-predict", "run the non-learned baseline over a manifest");
  base_flags.attach(base);
  base->add_option("--manifest", manifest, "manifest.json")->required()->check(CLI::ExistingFile);
  base->add_option("--out", pred_dir, "prediction directory")->required();

  MatchFlags eval_match;
  double bucket = 0.5;
  auto* eval = app.add_subcommand("evaluate", "score predictions against ground truth");
  eval->add_option("--manifest", manifest, "manifest.json")->required()->check(CLI::ExistingFile);
  eval->add_option("--pred-dir", pred_dir, "directory of <id>_prediction.sbrb")->required();
  eval->add_option("--out", out_path, "report directory")->required();
  eval->add_option("--sbr-bucket", bucket, "SBR bucket width for per-bucket curves")->capture_default_str();
  eval_match.attach(eval);

  std::vector<std::string> pca_inputs;
  std::size_t per_image = 20;
  std::uint64_t pca_seed = 0;
  auto* pca = app.add_subcommand("pca", "PCA of 32x32 patches from labelled measurements");
  pca->add_option("--input", pca_inputs, "domain=path, repeatable")->required();
  pca->add_option("--patches", per_image, "random patches per image")->capture_default_str();
  pca->add_option("--seed", pca_seed, "patch placement seed")->capture_default_str();
  pca->add_option("--out", out_path, "CSV path")->required();

  ConfigFlags sweep_flags;
  SweepFlags sw;
  MatchFlags sweep_match;
  auto* sweep = app.add_subcommand("sweep-sbr", "evaluate a predictor over an SBR by scattering-length grid");
  sweep_flags.attach(sweep);
  sweep_match.attach(sweep);
  sweep->add_option("--sbr", sw.sbr, "test SBR values")->delimiter(',');
  sweep->add_option("--pred-dir", sw.pred_dir, "predictions per cell (default: baseline)");
  sweep->add_option("--out", sw.out, "sweep directory")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "check a dataset against its manifest");
  verify->add_option("--manifest", manifest, "manifest.json")->required()->check(CLI::ExistingFile);

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return cmd_generate(gen_flags, out_path, out, err);
    if (*vols) return cmd_gen_volumes(vol_flags, out_path, out, err);
    if (*psf) return cmd_gen_psf(psf_flags, out_path, tiff, out, err);
    if (*sim) return cmd_simulate(sim_flags, sf, out, err);
    if (*views) return cmd_views(view_flags, in_path, out_path, out, err);
    if (*ref) return cmd_refocus(ref_flags, in_path, out_path, out, err);
    if (*bgr) return cmd_bgremove(in_path, out_path, bgr_mode, bgr_radius, out);
    if (*base) return cmd_baseline(base_flags, manifest, pred_dir, out, err);
    if (*eval) return cmd_evaluate(manifest, pred_dir, out_path, eval_match, bucket, out);
    if (*pca) return cmd_pca(pca_inputs, per_image, pca_seed, out_path, out);
    if (*sweep) return cmd_sweep(sweep_flags, sw, sweep_match, out, err);
    if (*verify) return cmd_verify(manifest, out, err);
  } catch (const Error& e) {
    err << "error kind=" << to_string(e.kind()) << " message=\"" << e.what() << "\"\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error kind=internal message=\"" << e.what() << "\"\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace scatterfield::app
