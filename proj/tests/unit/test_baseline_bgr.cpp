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

#include "doctest.h"
#include "helpers.hpp"
#include "scatterfield/baseline_bgr.hpp"
#include "scatterfield/kernels.hpp"
#include "scatterfield/reference.hpp"

using namespace scatterfield;

namespace {

Image add_spot(Image img, double r0, double c0, double sigma, double peak) {
  for (std::size_t r = 0; r < img.rows(); ++r)
    for (std::size_t c = 0; c < img.cols(); ++c) {
      const double d2 = (r - r0) * (r - r0) + (c - c0) * (c - c0);
      if (d2 <= 9.0 * sigma * sigma) img(r, c) += peak * std::exp(-0.5 * d2 / (sigma * sigma));
    }
  return img;
}

Image smooth_background(Shape2 s, std::uint64_t seed, double level) {
  Image noise(s);
  for (double& v : noise.values()) v = static_cast<double>(uniform_below(seed, 1000)) / 999.0;
  Image bg = kernels::gaussian_blur(noise, 12.0);
  normalize_by_max(bg.values());
  for (double& v : bg.values()) v *= level;
  return bg;
}

Image random_image(Shape2 s, std::uint64_t seed) {
  Image img(s);
  for (double& v : img.values()) v = static_cast<double>(uniform_below(seed, 1u << 16));
  return img;
}

double energy(const Image& img) {
  double e = 0.0;
  for (double v : img.values()) e += v * v;
  return e;
}

}  // namespace

TEST_SUITE("baseline_bgr") {

TEST_CASE("constant image is fully removed in both modes") {
  const Image flat(64, 80, 0.4);
  for (BgrMode mode : {BgrMode::morphological_open, BgrMode::gaussian_highpass}) {
    const Image out = remove_background(flat, {15, mode});
    CHECK(max_value(out.values()) <= 1e-15);
  }
}

TEST_CASE("isolated spot smaller than the disk survives opening") {
  const Image m = add_spot(Image(96, 96), 40.0, 52.0, 2.0, 1.0);
  const Image out = remove_background(m, {15, BgrMode::morphological_open});
  CHECK(out(40, 52) >= 0.95 * m(40, 52));
}

TEST_CASE("weak spot on a strong background is mostly removed") {
  // Peak at 1.05 times the local background.
  Image m(96, 96, 1.0);
  m = add_spot(m, 48.0, 48.0, 6.0, 0.05);
  for (BgrMode mode : {BgrMode::morphological_open, BgrMode::gaussian_highpass}) {
    const Image out = remove_background(m, {15, mode});
    CHECK(out(48, 48) < 0.1 * m(48, 48));
  }
}

TEST_CASE("output is non-negative and bounded by the input") {
  const Image bg = smooth_background({128, 128}, 5, 0.8);
  Image m = bg;
  for (int i = 0; i < 12; ++i) m = add_spot(m, 10.0 + 9.0 * i, 20.0 + 7.0 * i, 2.0, 0.5);
  for (BgrMode mode : {BgrMode::morphological_open, BgrMode::gaussian_highpass}) {
    const Image out = remove_background(m, {15, mode});
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(out.values()[i] >= 0.0);
      CHECK(out.values()[i] <= m.values()[i]);
    }
  }
}

TEST_CASE("second application changes energy by less than ten percent") {
  Image m = smooth_background({128, 128}, 6, 0.5);
  for (int i = 0; i < 10; ++i) m = add_spot(m, 15.0 + 10.0 * i, 100.0 - 8.0 * i, 2.5, 0.6);
  const BgrParams p{15, BgrMode::morphological_open};
  const Image once = remove_background(m, p);
  const Image twice = remove_background(once, p);
  double diff = 0.0;
  for (std::size_t i = 0; i < once.size(); ++i) diff += std::pow(once.values()[i] - twice.values()[i], 2);
  CHECK(diff < 0.1 * energy(once));
}

TEST_CASE("opening never exceeds the input") {
  const Image m = random_image({40, 50}, 9);
  const Image o = opening(m, 4);
  for (std::size_t i = 0; i < m.size(); ++i) CHECK(o.values()[i] <= m.values()[i]);
  const Image o2 = opening(o, 4);
  CHECK(std::equal(o.values().begin(), o.values().end(), o2.values().begin()));
}

TEST_CASE("erosion and dilation match the naive disk scan") {
  for (int radius : {1, 2, 5, 15}) {
    const Image m = random_image({37, 61}, 100 + radius);
    const Image e = kernels::erode_disk(m, radius), en = reference::erode_disk_naive(m, radius);
    const Image d = kernels::dilate_disk(m, radius), dn = reference::dilate_disk_naive(m, radius);
    CHECK(std::equal(e.values().begin(), e.values().end(), en.values().begin()));
    CHECK(std::equal(d.values().begin(), d.values().end(), dn.values().begin()));
  }
}

TEST_CASE("radius below one and unknown modes are rejected") {
  CHECK(sf_test::error_kind_of([] { remove_background(Image(8, 8), {0, BgrMode::morphological_open}); }) ==
        ErrorKind::invalid_argument);
  CHECK(sf_test::error_kind_of([] { bgr_mode_from_string("tophat"); }) == ErrorKind::invalid_argument);
  CHECK(bgr_mode_from_string("highpass") == BgrMode::gaussian_highpass);
  CHECK(to_string(BgrMode::morphological_open) == "morphological_open");
}

TEST_CASE("baseline prediction keeps only the strong refocused response") {
  const ViewGeometry geo = sf_test::small_geometry();
  Image m(geo.sensor);
  for (std::size_t i = 0; i < kViewCount; ++i) m = add_spot(m, geo.centers[i][0], geo.centers[i][1], 1.5, 1.0);
  const std::vector<double> z = {-25.0, 0.0, 25.0};
  const Grid3 pred = baseline_predict(m, geo, z, {});
  CHECK(pred.planes() == 3);
  CHECK(max_value(pred.values()) == doctest::Approx(1.0));
  for (double v : pred.values()) CHECK((v == 0.0 || v >= 0.5));
  // In-focus plane holds the peak.
  CHECK(pred(1, 16, 16) == doctest::Approx(1.0));
}

}  // TEST_SUITE
