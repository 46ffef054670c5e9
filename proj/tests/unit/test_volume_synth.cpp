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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "scatterfield/reference.hpp"
#include "scatterfield/volume_synth.hpp"

using namespace scatterfield;
using sf_test::small_grid;

TEST_SUITE("volume_synth") {

TEST_CASE("degenerate density gives the exact count") {
  VolumeRecipe r;
  r.density_std_per_mm3 = 0.0;
  r.density_mean_per_mm3 = 180.0 / r.placement_volume_mm3();  // 180 emitters in the placement volume
  CHECK(sample_emitters(r).size() == 180);

  r.density_mean_per_mm3 = 180.0;
  CHECK(sample_emitters(r).size() == static_cast<std::size_t>(std::llround(180.0 * r.placement_volume_mm3())));
}

TEST_CASE("same seed gives identical emitters and volumes") {
  VolumeRecipe r;
  r.grid = {8, 128, 128, 4.15, 25.0, -50.0};
  r.density_mean_per_mm3 = 3000.0;
  r.seed = 42;
  const Volume a = synthesize_volume(r);
  const Volume b = synthesize_volume(r);
  CHECK(a.emitters == b.emitters);
  CHECK(a.data.values().size() == b.data.values().size());
  CHECK(std::equal(a.data.values().begin(), a.data.values().end(), b.data.values().begin()));
  r.seed = 43;
  CHECK(sample_emitters(r) != a.emitters);
}

TEST_CASE("mean diameter over 10000 draws") {
  VolumeRecipe r;
  r.density_std_per_mm3 = 0.0;
  r.density_mean_per_mm3 = 10000.0 / r.placement_volume_mm3();
  r.seed = 7;
  const auto emitters = sample_emitters(r);
  REQUIRE(emitters.size() == 10000);
  double sum = 0.0;
  for (const Emitter& e : emitters) {
    sum += e.diameter_um;
    CHECK(e.diameter_um >= 1.0);
    CHECK(e.brightness > 0.0);
    CHECK(e.brightness <= 1.0);
  }
  CHECK(sum / 10000.0 == doctest::Approx(15.0).epsilon(0.1 / 15.0));
}

TEST_CASE("emitters lie inside the placement cylinder") {
  VolumeRecipe r;
  r.grid = small_grid();
  r.density_mean_per_mm3 = 50000.0;
  r.seed = 3;
  const double radius = 0.5 * r.effective_fov_diameter_um();
  for (const Emitter& e : sample_emitters(r)) {
    CHECK(std::hypot(e.x_um, e.y_um) + 0.5 * e.diameter_um <= radius + 1e-9);
    CHECK(e.z_um - 0.5 * e.diameter_um >= r.grid.z_min_um());
    CHECK(e.z_um + 0.5 * e.diameter_um <= r.grid.z_max_um());
  }
}

TEST_CASE("zero-volume grid is an invalid recipe") {
  VolumeRecipe r;
  r.grid.planes = 0;
  CHECK(sf_test::error_kind_of([&] { sample_emitters(r); }) == ErrorKind::invalid_recipe);
  r = VolumeRecipe{};
  r.grid.rows = 0;
  CHECK(sf_test::error_kind_of([&] { sample_emitters(r); }) == ErrorKind::invalid_recipe);
}

TEST_CASE("empty emitter list rasterizes to zeros") {
  const Volume v = rasterize({}, small_grid());
  CHECK(v.data.planes() == 4);
  CHECK(std::all_of(v.data.values().begin(), v.data.values().end(), [](double x) { return x == 0.0; }));
}

TEST_CASE("sphere mass matches the analytic volume within 3 percent") {
  const GridSpec g = {8, 64, 64, 4.15, 25.0, -50.0};
  const Emitter e{0.0, 0.0, g.z_of_plane(3), 15.0, 0.8};
  const Volume v = rasterize(std::span(&e, 1), g);
  const double fine_voxel = (4.15 / 5) * (4.15 / 5) * (25.0 / 5);
  const double expected = 4.0 / 3.0 * std::numbers::pi * std::pow(7.5, 3) * 0.8 / fine_voxel / 125.0;
  const double mass = sum_values(v.data.values());
  CHECK(std::abs(mass / expected - 1.0) <= 0.03);
}

TEST_CASE("emitter on plane k only touches neighbouring planes") {
  const GridSpec g = {8, 64, 64, 4.15, 25.0, -50.0};
  for (double d : {5.0, 10.0, 15.0}) {
    const Emitter e{3.1, -2.0, g.z_of_plane(4), d, 0.9};
    const Volume v = rasterize(std::span(&e, 1), g);
    for (std::size_t k = 0; k < g.planes; ++k) {
      const double plane_sum = sum_values(v.data.plane(k));
      if (k + 1 < 4 || k > 5) CHECK(plane_sum == 0.0);
    }
    CHECK(sum_values(v.data.plane(4)) > 0.0);
  }
}

TEST_CASE("fine-grid mass equals 125 times coarse mass") {
  const GridSpec g = small_grid();
  VolumeRecipe r;
  r.grid = g;
  r.density_mean_per_mm3 = 20000.0;
  r.seed = 11;
  const auto emitters = sample_emitters(r);
  REQUIRE(!emitters.empty());
  const Grid3 fine = reference::rasterize_fine(emitters, g);
  const Grid3 pooled = reference::mean_pool(fine);
  const Volume v = rasterize(emitters, g);
  CHECK(sum_values(fine.values()) == doctest::Approx(125.0 * sum_values(pooled.values())).epsilon(1e-12));
  // The parallel rasterizer and the fine-grid oracle agree bit for bit.
  CHECK(std::equal(pooled.values().begin(), pooled.values().end(), v.data.values().begin()));
}

TEST_CASE("lateral shift by five voxels shifts the footprint") {
  const GridSpec g = {6, 48, 48, 4.15, 25.0, -50.0};
  const Emitter a{-10.0, 3.0, 12.0, 14.0, 0.8};
  Emitter b = a;
  b.x_um += 5 * g.pitch_xy_um;
  b.y_um -= 5 * g.pitch_xy_um;
  const Volume va = rasterize(std::span(&a, 1), g);
  const Volume vb = rasterize(std::span(&b, 1), g);
  double worst = 0.0;
  for (std::size_t k = 0; k < g.planes; ++k)
    for (std::size_t r = 5; r < g.rows; ++r)
      for (std::size_t c = 0; c + 5 < g.cols; ++c) worst = std::max(worst, std::abs(va.data(k, r, c) - vb.data(k, r - 5, c + 5)));
  CHECK(worst <= 1e-12);
  CHECK(sum_values(va.data.values()) == doctest::Approx(sum_values(vb.data.values())).epsilon(1e-12));
}

TEST_CASE("voxel values stay in [0, 1] with overlaps") {
  const GridSpec g = small_grid();
  const std::vector<Emitter> es = {{0, 0, 0, 20, 1.0}, {3, 2, 4, 18, 0.9}, {-4, 1, -3, 16, 0.7}};
  const Volume v = rasterize(es, g);
  CHECK(max_value(v.data.values()) <= 1.0);
  CHECK(*std::min_element(v.data.values().begin(), v.data.values().end()) >= 0.0);
}

TEST_CASE("emitter outside the grid is rejected with its index") {
  const GridSpec g = small_grid();
  const std::vector<Emitter> es = {{0, 0, 0, 10, 0.8}, {500, 0, 0, 10, 0.8}};
  const std::string msg = sf_test::error_message_of([&] { rasterize(es, g); });
  CHECK(msg.find("emitter 1") != std::string::npos);
  CHECK(sf_test::error_kind_of([&] { rasterize(es, g); }) == ErrorKind::invalid_argument);
}

TEST_CASE("emitter CSV round-trips") {
  sf_test::TempDir dir("csv");
  const std::vector<Emitter> es = {{1.25, -3.5, 12.0, 14.2, 0.75}, {0.1, 0.2, 0.3, 15.0, 1.0}};
  write_emitters_csv(dir / "e.csv", es);
  CHECK(read_emitters_csv(dir / "e.csv") == es);
  std::ifstream in(dir / "e.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "x_um,y_um,z_um,diameter_um,brightness");
}

}  // TEST_SUITE
