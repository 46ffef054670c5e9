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
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "scatterfield/dataset_io.hpp"
#include "scatterfield/manifest.hpp"

using namespace scatterfield;
namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void dump(const fs::path& p, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Stack random_stack(std::uint64_t seed) {
  Stack s;
  s.header.axes = "z,y,x";
  s.header.shape = {2, 3, 4};
  s.header.pixel_pitch_um = 4.15;
  s.header.z0_um = -50.0;
  s.header.dz_um = 25.0;
  s.header.meta = {{"sbr", 2.5}, {"note", "pi"}};
  s.data.resize(24);
  for (std::size_t i = 0; i < s.data.size(); ++i) {
    float& v = s.data[i];
    const auto bits = static_cast<std::uint32_t>(derive_seed(seed, {i}));
    std::memcpy(&v, &bits, 4);
    if (v != v) v = 1.0f;  // keep NaN payloads out so equality is meaningful
  }
  return s;
}

std::vector<std::string> ids(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "s%05zu", i);
    out.emplace_back(buf);
  }
  return out;
}

// Minimal sample: measurement with meta, placeholder companions.
void fake_sample(const fs::path& dir, const std::string& id, double sbr) {
  const SampleFiles f = SampleFiles::for_id(id);
  Stack m = stack_from_image(Image(4, 4, 0.5), 2.4 / 0.52,
                             {{"sbr_target", sbr},
                              {"ls_um", 80.0},
                              {"seeds", {{"volume", 1}, {"noise", 2}}},
                              {"attenuation", {{"surface_z_um", -50.0}}}});
  write_stack(dir / f.measurement, m);
  write_stack(dir / f.views, stack_from_grid(Grid3(9, 2, 2), "c,y,x", 4.15, 0.0, 0.0));
  write_stack(dir / f.refocus, stack_from_grid(Grid3(3, 2, 2), "z,y,x", 4.15, -50.0, 25.0));
  write_stack(dir / f.volume, stack_from_grid(Grid3(3, 2, 2), "z,y,x", 4.15, -50.0, 25.0));
  std::ofstream(dir / f.emitters) << "x_um,y_um,z_um,diameter_um,brightness\n";
}

}  // namespace

TEST_SUITE("dataset_io") {

TEST_CASE("stack round-trips bit for bit") {
  sf_test::TempDir dir("stack");
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Stack s = random_stack(seed);
    write_stack(dir / "a.sbrb", s);
    const Stack r = read_stack(dir / "a.sbrb");
    CHECK(std::memcmp(r.data.data(), s.data.data(), 4 * s.data.size()) == 0);
    CHECK(r.header.shape == s.header.shape);
    CHECK(r.header.axes == "z,y,x");
    CHECK(r.header.meta.at("sbr").get<double>() == 2.5);
    CHECK(r.header.z0_um == -50.0);
  }
}

TEST_CASE("preamble layout and payload size") {
  const Stack s = random_stack(1);
  const auto bytes = encode_stack(s);
  CHECK(std::equal(kStackMagic.begin(), kStackMagic.end(), bytes.begin()));
  CHECK(bytes[4] == 1);
  const std::uint32_t header_len = bytes[5] | bytes[6] << 8 | bytes[7] << 16 | static_cast<std::uint32_t>(bytes[8]) << 24;
  CHECK(bytes.size() - kStackPreambleBytes - header_len == 96);
  const Json header = Json::parse(bytes.begin() + 9, bytes.begin() + 9 + header_len);
  CHECK(header.at("dtype") == "f32le");
  CHECK(header.at("shape") == Json::array({2, 3, 4}));
  // First payload word is little-endian.
  std::uint32_t first = 0;
  std::memcpy(&first, s.data.data(), 4);
  const std::uint8_t* p = bytes.data() + 9 + header_len;
  CHECK((p[0] | p[1] << 8 | p[2] << 16 | static_cast<std::uint32_t>(p[3]) << 24) == first);
}

TEST_CASE("corrupt files fail with distinct kinds") {
  sf_test::TempDir dir("corrupt");
  const auto good = encode_stack(random_stack(2));

  auto bad = good;
  bad[0] = 'X';
  dump(dir / "magic.sbrb", bad);
  CHECK(sf_test::error_kind_of([&] { read_stack(dir / "magic.sbrb"); }) == ErrorKind::bad_magic);

  bad = good;
  bad[4] = 2;
  dump(dir / "version.sbrb", bad);
  CHECK(sf_test::error_kind_of([&] { read_stack(dir / "version.sbrb"); }) == ErrorKind::unsupported_version);

  bad = good;
  bad.pop_back();
  dump(dir / "short.sbrb", bad);
  CHECK(sf_test::error_kind_of([&] { read_stack(dir / "short.sbrb"); }) == ErrorKind::truncated);
  const std::string msg = sf_test::error_message_of([&] { read_stack(dir / "short.sbrb"); });
  CHECK(msg.find("96") != std::string::npos);
  CHECK(msg.find("95") != std::string::npos);
  CHECK(msg.find("short.sbrb") != std::string::npos);

  bad.assign(good.begin(), good.begin() + 5);
  CHECK(sf_test::error_kind_of([&] { decode_stack(bad, "mem"); }) == ErrorKind::truncated);

  CHECK(sf_test::error_kind_of([&] { read_stack(dir / "absent.sbrb"); }) == ErrorKind::io);
}

TEST_CASE("header validation") {
  StackHeader h;
  h.axes = "z,y,x";
  h.shape = {2, 3};
  CHECK(sf_test::error_kind_of([&] { h.validate(); }) == ErrorKind::bad_header);
  h.shape = {2, 0, 3};
  CHECK(sf_test::error_kind_of([&] { h.validate(); }) == ErrorKind::bad_header);
  h.axes = "t,y,x";
  h.shape = {1, 1, 1};
  CHECK(sf_test::error_kind_of([&] { h.validate(); }) == ErrorKind::bad_header);
  h.axes = "y,x";
  h.shape = {5, 7};
  CHECK_NOTHROW(h.validate());
  CHECK(h.element_count() == 35);
}

TEST_CASE("word swap handles both byte orders") {
  const std::vector<std::uint8_t> in = {1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<std::uint8_t> out(8);
  swap_words_to_le(in, out, std::endian::little);
  CHECK(out == in);
  swap_words_to_le(in, out, std::endian::big);
  CHECK(out == std::vector<std::uint8_t>{4, 3, 2, 1, 8, 7, 6, 5});
  std::vector<std::uint8_t> back(8);
  swap_words_to_le(out, back, std::endian::big);
  CHECK(back == in);
  std::vector<std::uint8_t> odd(7);
  CHECK(sf_test::error_kind_of([&] { swap_words_to_le(std::span(in).first(7), odd, std::endian::big); }) ==
        ErrorKind::invalid_argument);
}

TEST_CASE("image and grid conversions") {
  Image img(3, 5);
  for (std::size_t i = 0; i < img.size(); ++i) img.values()[i] = 0.25 * static_cast<double>(i);
  const Stack s = stack_from_image(img, 4.6);
  CHECK(s.header.axes == "y,x");
  CHECK(image_from_stack(s).values()[7] == 1.75);
  CHECK(sf_test::error_kind_of([&] { grid_from_stack(s); }) == ErrorKind::shape_mismatch);
  const Stack g = stack_from_grid(Grid3(2, 3, 5), "z,y,x", 4.15, -50.0, 25.0);
  CHECK(grid_from_stack(g).planes() == 2);
}

TEST_CASE("split counts follow the rounding rule") {
  const SplitFractions f{0.8, 0.2, 0.0};
  for (auto [n, train, val] : {std::tuple{500u, 400u, 100u}, std::tuple{5u, 4u, 1u}, std::tuple{7u, 5u, 2u}}) {
    const auto split = assign_splits(ids(n), 3, f);
    CHECK(static_cast<std::size_t>(std::count(split.begin(), split.end(), "train")) == train);
    CHECK(static_cast<std::size_t>(std::count(split.begin(), split.end(), "val")) == val);
  }
  const auto three = assign_splits(ids(10), 3, {0.6, 0.2, 0.2});
  CHECK(std::count(three.begin(), three.end(), "test") == 2);
  CHECK(sf_test::error_kind_of([] { assign_splits(ids(3), 0, {0.5, 0.2, 0.0}); }) == ErrorKind::invalid_argument);
}

TEST_CASE("same split seed gives the same split") {
  const auto a = assign_splits(ids(50), 11, {});
  CHECK(a == assign_splits(ids(50), 11, {}));
  CHECK(a != assign_splits(ids(50), 12, {}));
}

TEST_CASE("manifest build, write, read and verify") {
  sf_test::TempDir dir("manifest");
  for (std::size_t i = 0; i < 5; ++i) fake_sample(dir.path(), ids(5)[i], 1.1 + 0.3 * static_cast<double>(i));
  const Manifest m = build_manifest(dir.path(), 9, {});
  REQUIRE(m.samples.size() == 5);
  CHECK(m.samples[2].id == "s00002");
  CHECK(m.samples[2].sbr == doctest::Approx(1.7));
  CHECK(m.samples[2].ls_um == 80.0);
  CHECK(m.samples[2].seeds.at("noise") == 2);
  CHECK(m.samples[2].extra.at("surface_z_um") == -50.0);
  write_manifest(dir.path(), m);
  CHECK(fs::exists(dir / "split.json"));
  const Manifest r = read_manifest(dir / "manifest.json");
  REQUIRE(r.samples.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(r.samples[i].to_json() == m.samples[i].to_json());
    CHECK(r.samples[i].split == m.samples[i].split);
  }
  // Pretty-printed, LF only.
  const auto text = slurp(dir / "manifest.json");
  CHECK(std::count(text.begin(), text.end(), '\n') > 5);
  CHECK(std::count(text.begin(), text.end(), '\r') == 0);
  CHECK(verify_dataset(dir / "manifest.json").empty());

  fs::remove(dir / "s00003_refocus.sbrb");
  const auto problems = verify_dataset(dir / "manifest.json");
  REQUIRE(problems.size() == 1);
  CHECK(problems[0].find("s00003_refocus.sbrb") != std::string::npos);
  const std::string msg = sf_test::error_message_of([&] { build_manifest(dir.path(), 9, {}); });
  CHECK(msg.find("s00003_refocus.sbrb") != std::string::npos);
}

TEST_CASE("verify reports duplicate ids and unreadable stacks") {
  sf_test::TempDir dir("verify");
  fake_sample(dir.path(), "s00000", 2.0);
  Manifest m = build_manifest(dir.path(), 0, {});
  m.samples.push_back(m.samples.front());
  write_manifest(dir.path(), m);
  dump(dir / "s00000_volume.sbrb", {'S', 'B', 'R', 'B'});
  const auto problems = verify_dataset(dir / "manifest.json");
  CHECK(std::any_of(problems.begin(), problems.end(), [](const std::string& p) { return p.find("duplicate") != std::string::npos; }));
  CHECK(std::any_of(problems.begin(), problems.end(), [](const std::string& p) { return p.find("s00000_volume.sbrb") != std::string::npos; }));
}

TEST_CASE("TIFF export writes one float page per plane") {
  sf_test::TempDir dir("tiff");
  const Stack s = stack_from_grid(Grid3(3, 4, 5, 0.5), "z,y,x", 4.15, 0.0, 25.0);
  export_tiff(dir / "a.tif", s);
  const auto bytes = slurp(dir / "a.tif");
  REQUIRE(bytes.size() > 3 * 4 * 5 * 4);
  CHECK(bytes[0] == 'I');
  CHECK(bytes[1] == 'I');
  CHECK(bytes[2] == 42);
  CHECK(bytes[3] == 0);
}

}  // TEST_SUITE
