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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scatterfield/dataset_io.hpp"

namespace scatterfield {

/// File names of one sample inside a dataset directory.
struct SampleFiles {
  std::string measurement;
  std::string views;
  std::string refocus;
  std::string volume;
  std::string emitters;
  std::string free_space;
  std::string clean;

  static SampleFiles for_id(const std::string& id);
};

struct SampleRecord {
  std::string id;
  std::string measurement_path;
  std::string views_path;
  std::string refocus_path;
  std::string volume_path;
  std::string emitters_csv;
  double sbr = 0.0;
  std::optional<double> ls_um;
  std::map<std::string, std::uint64_t> seeds;
  std::string split;
  Json extra = Json::object();  // further paths and metadata, written alongside

  Json to_json() const;
  static SampleRecord from_json(const Json& j);
};

struct SplitFractions {
  double train = 0.8;
  double val = 0.2;
  double test = 0.0;

  void validate() const;
};

struct Manifest {
  std::vector<SampleRecord> samples;
  SplitFractions fractions;
  std::uint64_t split_seed = 0;
};

/// Deterministic split labels for sorted ids: a seeded Fisher-Yates shuffle, then
/// floor(n * train) train, floor(n * val) val when a test fraction is set (else the
/// rest), remainder test.
std::vector<std::string> assign_splits(const std::vector<std::string>& sorted_ids, std::uint64_t split_seed,
                                       const SplitFractions& fractions);

/// Scans `dataset_dir` for *_measurement.sbrb files, reads their metadata and
/// assigns splits. Throws Error(data) listing every missing companion file.
Manifest build_manifest(const std::filesystem::path& dataset_dir, std::uint64_t split_seed,
                        const SplitFractions& fractions);

/// Writes manifest.json (a JSON array of records) and the split.json sidecar
/// holding the fractions and split seed.
void write_manifest(const std::filesystem::path& dataset_dir, const Manifest& manifest);
Manifest read_manifest(const std::filesystem::path& manifest_path);

/// Referential-integrity problems (missing files, duplicate ids, unreadable
/// stacks); empty when the dataset is consistent.
std::vector<std::string> verify_dataset(const std::filesystem::path& manifest_path);

}  // namespace scatterfield
