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

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <string>

#include "scatterfield/app/run_config.hpp"
#include "scatterfield/error.hpp"
#include "scatterfield/grid.hpp"
#include "scatterfield/optics.hpp"
#include "scatterfield/rng.hpp"
#include "scatterfield/volume_synth.hpp"

namespace sf_test {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = fs::temp_directory_path() /
            ("scatterfield_" + tag + "_" + std::to_string(stamp) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const noexcept { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

// 4 planes of 32x32 voxels behind a 104x104 sensor with 32-pixel views.
inline scatterfield::GridSpec small_grid() { return {4, 32, 32, 4.15, 25.0, -50.0}; }

inline scatterfield::ViewGeometry small_geometry() {
  return scatterfield::with_parallax(scatterfield::default_view_geometry({104, 104}, 32),
                                     scatterfield::SyntheticPsfParams{});
}

inline scatterfield::app::RunConfig small_config() {
  auto cfg = scatterfield::app::RunConfig::defaults(scatterfield::app::Preset::desk);
  cfg.volume.grid = small_grid();
  cfg.volume.density_mean_per_mm3 = 8000.0;
  cfg.volume.density_std_per_mm3 = 1000.0;
  cfg.view_size = 32;
  cfg.sensor = {104, 104};
  cfg.n = 3;
  cfg.jobs = 1;
  return cfg;
}

// Error kind of the exception thrown by f, or nullopt if none.
template <class F>
std::optional<scatterfield::ErrorKind> error_kind_of(F&& f) {
  try {
    f();
  } catch (const scatterfield::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

template <class F>
std::string error_message_of(F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

inline double sum_image(const scatterfield::Image& img) { return scatterfield::sum_values(img.values()); }

}  // namespace sf_test
