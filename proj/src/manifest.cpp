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

#include "scatterfield/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "scatterfield/error.hpp"
#include "scatterfield/rng.hpp"

namespace scatterfield {

namespace fs = std::filesystem;

SampleFiles SampleFiles::for_id(const std::string& id) {
  return {id + "_measurement.sbrb", id + "_views.sbrb",      id + "_refocus.sbrb", id + "_volume.sbrb",
          id + "_emitters.csv",     id + "_free_space.sbrb", id + "_clean.sbrb"};
}

Json SampleRecord::to_json() const {
  Json j = {{"id", id},
            {"measurement_path", measurement_path},
            {"views_path", views_path},
            {"refocus_path", refocus_path},
            {"volume_path", volume_path},
            {"emitters_csv", emitters_csv},
            {"sbr", sbr},
            {"ls_um", ls_um ? Json(*ls_um) : Json(nullptr)},
            {"seeds", seeds},
            {"split", split}};
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  return j;
}

SampleRecord SampleRecord::from_json(const Json& j) {
  SampleRecord r;
  try {
    r.id = j.at("id").get<std::string>();
    r.measurement_path = j.at("measurement_path").get<std::string>();
    r.views_path = j.at("views_path").get<std::string>();
    r.refocus_path = j.at("refocus_path").get<std::string>();
    r.volume_path = j.at("volume_path").get<std::string>();
    r.emitters_csv = j.at("emitters_csv").get<std::string>();
    r.sbr = j.at("sbr").get<double>();
    if (!j.at("ls_um").is_null()) r.ls_um = j.at("ls_um").get<double>();
    r.seeds = j.at("seeds").get<std::map<std::string, std::uint64_t>>();
    r.split = j.at("split").get<std::string>();
  } catch (const Json::exception& e) {
    fail(ErrorKind::format, std::string("manifest record: ") + e.what());
  }
  static const std::set<std::string> core = {"id",           "measurement_path", "views_path", "refocus_path",
                                             "volume_path",  "emitters_csv",     "sbr",        "ls_um",
                                             "seeds",        "split"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!core.count(it.key())) r.extra[it.key()] = it.value();
  return r;
}

void SplitFractions::validate() const {
  require(train >= 0.0 && val >= 0.0 && test >= 0.0 && std::abs(train + val + test - 1.0) < 1e-9,
          ErrorKind::invalid_argument, "split fractions must be non-negative and sum to 1");
}

std::vector<std::string> assign_splits(const std::vector<std::string>& sorted_ids, std::uint64_t split_seed,
                                       const SplitFractions& fractions) {
  fractions.validate();
  const std::size_t n = sorted_ids.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::uint64_t state = split_seed;
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_below(state, i)]);

  const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * fractions.train + 1e-9));
  const std::size_t n_val =
      fractions.test > 0.0
          ? std::min(n - n_train, static_cast<std::size_t>(std::floor(static_cast<double>(n) * fractions.val + 1e-9)))
          : n - n_train;
  std::vector<std::string> split(n);
  for (std::size_t rank = 0; rank < n; ++rank)
    split[order[rank]] = rank < n_train ? "train" : rank < n_train + n_val ? "val" : "test";
  return split;
}

Manifest build_manifest(const fs::path& dataset_dir, std::uint64_t split_seed, const SplitFractions& fractions) {
  require(fs::is_directory(dataset_dir), ErrorKind::io, dataset_dir.string() + " is not a directory");
  const std::string suffix = "_measurement.sbrb";
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(dataset_dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
      ids.push_back(name.substr(0, name.size() - suffix.size()));
  }
  std::sort(ids.begin(), ids.end());

  std::ostringstream missing;
  for (const std::string& id : ids) {
    const SampleFiles f = SampleFiles::for_id(id);
    for (const std::string* p : {&f.views, &f.refocus, &f.volume, &f.emitters})
      if (!fs::exists(dataset_dir / *p)) missing << "\n  " << (dataset_dir / *p).string();
  }
  if (!missing.str().empty()) fail(ErrorKind::data, "missing companion files:" + missing.str());

  const std::vector<std::string> splits = assign_splits(ids, split_seed, fractions);
  Manifest m;
  m.fractions = fractions;
  m.split_seed = split_seed;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const SampleFiles f = SampleFiles::for_id(ids[i]);
    const Stack meas = read_stack(dataset_dir / f.measurement);
    const Json& meta = meas.header.meta;
    SampleRecord r;
    r.id = ids[i];
    r.measurement_path = f.measurement;
    r.views_path = f.views;
    r.refocus_path = f.refocus;
    r.volume_path = f.volume;
    r.emitters_csv = f.emitters;
    r.sbr = meta.value("sbr_target", 0.0);
    if (meta.contains("ls_um") && meta.at("ls_um").is_number()) r.ls_um = meta.at("ls_um").get<double>();
    if (meta.contains("seeds")) r.seeds = meta.at("seeds").get<std::map<std::string, std::uint64_t>>();
    if (meta.contains("attenuation") && meta.at("attenuation").is_object())
      r.extra["surface_z_um"] = meta.at("attenuation").value("surface_z_um", 0.0);
    r.split = splits[i];
    for (const std::string* p : {&f.free_space, &f.clean}) {
      if (!fs::exists(dataset_dir / *p)) continue;
      const std::string key = p == &f.free_space ? "free_space_path" : "clean_measurement_path";
      r.extra[key] = *p;
    }
    m.samples.push_back(std::move(r));
  }
  return m;
}

void write_manifest(const fs::path& dataset_dir, const Manifest& manifest) {
  Json records = Json::array();
  for (const SampleRecord& r : manifest.samples) records.push_back(r.to_json());
  const auto write_text = [](const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorKind::io, "cannot open " + path.string() + " for writing");
    out << text << '\n';
    require(static_cast<bool>(out), ErrorKind::io, "write failed: " + path.string());
  };
  write_text(dataset_dir / "manifest.json", records.dump(2));
  Json split = {{"split_seed", manifest.split_seed},
                {"fractions",
                 {{"train", manifest.fractions.train}, {"val", manifest.fractions.val}, {"test", manifest.fractions.test}}},
                {"count", manifest.samples.size()}};
  write_text(dataset_dir / "split.json", split.dump(2));
}

Manifest read_manifest(const fs::path& manifest_path) {
  std::ifstream in(manifest_path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open " + manifest_path.string());
  Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_array()) fail(ErrorKind::format, manifest_path.string() + ": not a JSON array");
  Manifest m;
  for (const Json& rec : j) m.samples.push_back(SampleRecord::from_json(rec));
  const fs::path split_path = manifest_path.parent_path() / "split.json";
  if (fs::exists(split_path)) {
    std::ifstream sin(split_path, std::ios::binary);
    Json s = Json::parse(sin, nullptr, false);
    if (!s.is_discarded() && s.is_object()) {
      m.split_seed = s.value("split_seed", std::uint64_t{0});
      if (s.contains("fractions")) {
        m.fractions.train = s["fractions"].value("train", 0.8);
        m.fractions.val = s["fractions"].value("val", 0.2);
        m.fractions.test = s["fractions"].value("test", 0.0);
      }
    }
  }
  return m;
}

std::vector<std::string> verify_dataset(const fs::path& manifest_path) {
  std::vector<std::string> problems;
  Manifest m;
  try {
    m = read_manifest(manifest_path);
  } catch (const Error& e) {
    return {e.what()};
  }
  const fs::path base = manifest_path.parent_path();
  if (!fs::exists(base / "split.json")) problems.push_back("split.json sidecar is missing");
  std::set<std::string> ids;
  for (const SampleRecord& r : m.samples) {
    if (!ids.insert(r.id).second) problems.push_back("duplicate id " + r.id);
    if (r.split != "train" && r.split != "val" && r.split != "test")
      problems.push_back(r.id + ": unknown split \"" + r.split + "\"");
    std::vector<std::string> paths = {r.measurement_path, r.views_path, r.refocus_path, r.volume_path};
    for (auto it = r.extra.begin(); it != r.extra.end(); ++it)
      if (it.value().is_string() && it.key().size() > 5 && it.key().ends_with("_path"))
        paths.push_back(it.value().get<std::string>());
    for (const std::string& p : paths) {
      if (!fs::exists(base / p)) {
        problems.push_back(r.id + ": missing " + p);
        continue;
      }
      try {
        read_stack(base / p);
      } catch (const Error& e) {
        problems.push_back(r.id + ": " + e.what());
      }
    }
    if (!fs::exists(base / r.emitters_csv)) problems.push_back(r.id + ": missing " + r.emitters_csv);
  }
  return problems;
}

}  // namespace scatterfield
