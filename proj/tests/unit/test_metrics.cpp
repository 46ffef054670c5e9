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
#include <functional>
#include <limits>
#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "scatterfield/metrics.hpp"
#include "scatterfield/reference.hpp"

using namespace scatterfield;
using sf_test::small_grid;

namespace {

struct Instance {
  std::vector<std::vector<char>> valid;
  std::vector<std::vector<double>> cost;
};

Instance random_instance(std::uint64_t& s, std::size_t n, std::size_t m) {
  Instance in;
  in.valid.assign(n, std::vector<char>(m, 0));
  in.cost.assign(n, std::vector<double>(m, 0.0));
  const std::uint64_t density = 1 + uniform_below(s, 9);  // edge probability in tenths
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      in.valid[i][j] = uniform_below(s, 10) < density;
      in.cost[i][j] = static_cast<double>(uniform_below(s, 1000)) / 100.0;
    }
  return in;
}

// Minimum total cost over all maximum-size matchings, by exhaustive search.
std::pair<std::size_t, double> best_matching(const Instance& in) {
  const std::size_t n = in.valid.size(), m = n ? in.valid[0].size() : 0;
  std::vector<char> used(m, 0);
  std::size_t best_size = 0;
  double best_cost = 0.0;
  std::function<void(std::size_t, std::size_t, double)> rec = [&](std::size_t i, std::size_t size, double cost) {
    if (i == n) {
      if (size > best_size || (size == best_size && cost < best_cost)) best_size = size, best_cost = cost;
      return;
    }
    rec(i + 1, size, cost);
    for (std::size_t j = 0; j < m; ++j)
      if (in.valid[i][j] && !used[j]) {
        used[j] = 1;
        rec(i + 1, size + 1, cost + in.cost[i][j]);
        used[j] = 0;
      }
  };
  rec(0, 0, 0.0);
  return {best_size, best_cost};
}

double assignment_cost(const Assignment& a, const Instance& in) {
  double c = 0.0;
  for (const auto& [i, j] : a.pairs) c += in.cost[i][j];
  return c;
}

void check_consistent(const Assignment& a, const Instance& in, std::size_t n, std::size_t m) {
  std::vector<int> di(n, 0), tj(m, 0);
  for (const auto& [i, j] : a.pairs) {
    CHECK(in.valid[i][j]);
    ++di[i];
    ++tj[j];
  }
  for (std::size_t i : a.unmatched_detections) ++di[i];
  for (std::size_t j : a.unmatched_truth) ++tj[j];
  CHECK(std::all_of(di.begin(), di.end(), [](int x) { return x == 1; }));
  CHECK(std::all_of(tj.begin(), tj.end(), [](int x) { return x == 1; }));
}

Detection at(const Emitter& e) { return {e.x_um, e.y_um, e.z_um, 1.0}; }

std::vector<Emitter> random_truth(std::uint64_t& s, std::size_t n, const GridSpec& g) {
  std::vector<Emitter> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = (static_cast<double>(uniform_below(s, 1000)) / 1000.0 - 0.5) * 100.0;
    const double y = (static_cast<double>(uniform_below(s, 1000)) / 1000.0 - 0.5) * 100.0;
    const double z = g.z_of_plane(static_cast<double>(uniform_below(s, g.planes)));
    out.push_back({x, y, z, 15.0, 0.8});
  }
  return out;
}

std::vector<std::vector<double>> random_patches(std::uint64_t s, std::size_t n, std::size_t d) {
  std::vector<std::vector<double>> p(n, std::vector<double>(d));
  for (auto& v : p)
    for (double& x : v) x = static_cast<double>(uniform_below(s, 1u << 20)) / (1u << 20);
  return p;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("zero volume has no detections") {
  const GridSpec g = small_grid();
  CHECK(detect(Grid3(g.planes, g.rows, g.cols), g, 0.1).empty());
}

TEST_CASE("one bead gives one detection at its centre") {
  const GridSpec g{8, 48, 48, 4.15, 25.0, -100.0};
  const Emitter e{3.0, -5.0, g.z_of_plane(4), 15.0, 0.8};
  const Volume v = rasterize(std::span(&e, 1), g);
  const auto dets = detect(v.data, g, MatchConfig{}.intensity_threshold);
  REQUIRE(dets.size() == 1);
  CHECK(std::abs(dets[0].x_um - e.x_um) <= 0.5 * g.pitch_xy_um);
  CHECK(std::abs(dets[0].y_um - e.y_um) <= 0.5 * g.pitch_xy_um);
  CHECK(std::abs(dets[0].z_um - e.z_um) <= 0.5 * g.pitch_z_um);
  CHECK(dets[0].peak_value == doctest::Approx(max_value(v.data.values())));
}

TEST_CASE("beads more than three voxels apart are separate detections") {
  const GridSpec g{8, 48, 48, 4.15, 25.0, -100.0};
  const std::vector<Emitter> es = {{-20.0, 0.0, g.z_of_plane(3), 12.0, 0.8}, {20.0, 0.0, g.z_of_plane(3), 12.0, 0.8}};
  CHECK(detect(rasterize(es, g).data, g, 0.1).size() == 2);
}

TEST_CASE("exact detections score F1 of one in every occupied bin") {
  const GridSpec g = small_grid();
  std::uint64_t s = 4;
  const auto truth = random_truth(s, 7, g);
  std::vector<Detection> dets;
  for (const Emitter& e : truth) dets.push_back(at(e));
  const DetectionReport r = score(dets, truth, g, {});
  CHECK(r.tp == 7);
  CHECK(r.f1() == 1.0);
  for (const DepthCounts& b : r.bins)
    if (b.emitters) CHECK(b.f1() == 1.0);
}

TEST_CASE("no detections give zero precision, recall and F1") {
  const GridSpec g = small_grid();
  std::uint64_t s = 5;
  const auto truth = random_truth(s, 4, g);
  const DetectionReport r = score({}, truth, g, {});
  CHECK(r.precision() == 0.0);
  CHECK(r.recall() == 0.0);
  CHECK(r.f1() == 0.0);
  CHECK(r.fn == 4);
}

TEST_CASE("ratio identities and zero-denominator conventions") {
  CHECK(precision_of(0, 0) == 0.0);
  CHECK(recall_of(0, 0) == 0.0);
  CHECK(f1_of(0.0, 0.0) == 0.0);
  CHECK(precision_of(3, 1) == 0.75);
  CHECK(recall_of(3, 3) == 0.5);
  CHECK(f1_of(0.75, 0.5) == 2.0 * 0.75 * 0.5 / 1.25);
}

TEST_CASE("pairs match only inside both tolerances") {
  const GridSpec g = small_grid();
  const std::vector<Emitter> truth = {{0.0, 0.0, 0.0, 15.0, 0.8}};
  const MatchConfig cfg;
  CHECK(score(std::vector<Detection>{{8.3, 0.0, 25.0, 1.0}}, truth, g, cfg).tp == 1);
  CHECK(score(std::vector<Detection>{{8.31, 0.0, 0.0, 1.0}}, truth, g, cfg).tp == 0);
  CHECK(score(std::vector<Detection>{{0.0, 0.0, 25.01, 1.0}}, truth, g, cfg).tp == 0);
}

TEST_CASE("crafted six-by-five overlap matches the exhaustive optimum") {
  // Truth 0 has only detection 0; the cheap (0, 0) and (1, 1) pairs force truth 2
  // onto detection 5, and truths 3 and 4 compete for detections 2 to 4.
  Instance in;
  in.valid = {{1, 1, 0, 0, 0}, {0, 1, 1, 0, 0}, {0, 0, 0, 1, 0}, {0, 0, 0, 1, 1}, {0, 0, 0, 0, 1}, {0, 0, 1, 0, 0}};
  in.cost = {{1, 5, 0, 0, 0}, {0, 0.5, 9, 0, 0}, {0, 0, 0, 3, 0}, {0, 0, 0, 1, 2}, {0, 0, 0, 0, 1}, {0, 0, 4, 0, 0}};
  const Assignment h = match_pairs(6, 5, in.valid, in.cost, Matcher::hungarian);
  check_consistent(h, in, 6, 5);
  CHECK(h.pairs.size() == reference::max_matching_bruteforce(in.valid));
  CHECK(h.pairs.size() == 5);
  CHECK(assignment_cost(h, in) == doctest::Approx(best_matching(in).second));
}

TEST_CASE("hungarian equals brute force on random instances") {
  std::uint64_t s = 2024;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = uniform_below(s, 9), m = uniform_below(s, 9);
    const Instance in = random_instance(s, n, m);
    const Assignment h = match_pairs(n, m, in.valid, in.cost, Matcher::hungarian);
    check_consistent(h, in, n, m);
    const auto [size, cost] = best_matching(in);
    CHECK(h.pairs.size() == reference::max_matching_bruteforce(in.valid));
    CHECK(h.pairs.size() == size);
    CHECK(assignment_cost(h, in) == doctest::Approx(cost));
    const Assignment g = match_pairs(n, m, in.valid, in.cost, Matcher::greedy);
    check_consistent(g, in, n, m);
    CHECK(g.pairs.size() <= size);
  }
}

TEST_CASE("relabelling detections leaves the matching objective unchanged") {
  std::uint64_t s = 31;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + uniform_below(s, 8), m = 1 + uniform_below(s, 8);
    const Instance in = random_instance(s, n, m);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[uniform_below(s, i + 1)]);
    Instance pin;
    for (std::size_t i = 0; i < n; ++i) {
      pin.valid.push_back(in.valid[perm[i]]);
      pin.cost.push_back(in.cost[perm[i]]);
    }
    const Assignment a = match_pairs(n, m, in.valid, in.cost, Matcher::hungarian);
    const Assignment b = match_pairs(n, m, pin.valid, pin.cost, Matcher::hungarian);
    CHECK(a.pairs.size() == b.pairs.size());
    CHECK(assignment_cost(a, in) == doctest::Approx(assignment_cost(b, pin)));
  }
}

TEST_CASE("removing a true positive never raises F1") {
  const GridSpec g = small_grid();
  std::uint64_t s = 77;
  for (int trial = 0; trial < 40; ++trial) {
    const auto truth = random_truth(s, 2 + uniform_below(s, 6), g);
    std::vector<Detection> dets;
    for (const Emitter& e : truth)
      if (uniform_below(s, 4) != 0) dets.push_back({e.x_um + 2.0, e.y_um - 1.0, e.z_um, 1.0});
    // False positives stay outside every truth's tolerance: if another detection
    // could take over the freed truth, F1 can rise (an FP turns into a TP).
    for (int k = 0; k < 3; ++k) dets.push_back({200.0 + static_cast<double>(uniform_below(s, 60)), 40.0, 0.0, 1.0});
    const DetectionReport full = score(dets, truth, g, {});
    const Assignment a = match_detections(dets, truth, {});
    for (const auto& [i, j] : a.pairs) {
      std::vector<Detection> fewer = dets;
      fewer.erase(fewer.begin() + static_cast<long>(i));
      CHECK(score(fewer, truth, g, {}).f1() <= full.f1());
    }
  }
}

TEST_CASE("turning a TP into an FN lowers F1 at fixed counts") {
  for (std::size_t tp = 1; tp < 20; ++tp)
    for (std::size_t fp = 0; fp < 20; ++fp)
      for (std::size_t fn = 0; fn < 20; ++fn) {
        const double before = f1_of(precision_of(tp, fp), recall_of(tp, fn));
        const double after = f1_of(precision_of(tp - 1, fp), recall_of(tp - 1, fn + 1));
        CHECK(after < before);
      }
}

TEST_CASE("single-sample curve has zero standard error") {
  const GridSpec g = small_grid();
  std::uint64_t s = 8;
  const auto truth = random_truth(s, 6, g);
  std::vector<Detection> dets = {at(truth[0]), at(truth[1])};
  const std::vector<DetectionReport> reports = {score(dets, truth, g, {})};
  const auto rows = f1_vs_depth(reports, 80.0, g.z0_um);
  REQUIRE(!rows.empty());
  for (const CurveRow& r : rows) {
    CHECK(r.stderr_f1 == 0.0);
    CHECK(r.samples == 1);
    CHECK(r.z_over_ls == doctest::Approx(r.z_um / 80.0));
  }
}

TEST_CASE("perfect predictor gives a flat curve over 25 samples") {
  const GridSpec g = small_grid();
  std::uint64_t s = 9;
  std::vector<DetectionReport> reports;
  for (int i = 0; i < 25; ++i) {
    const auto truth = random_truth(s, 5, g);
    std::vector<Detection> dets;
    for (const Emitter& e : truth) dets.push_back(at(e));
    reports.push_back(score(dets, truth, g, {}));
  }
  const auto rows = f1_vs_depth(reports, std::nullopt, g.z0_um);
  CHECK(rows.size() == g.planes);
  for (const CurveRow& r : rows) {
    CHECK(r.f1 == 1.0);
    CHECK(r.stderr_f1 == 0.0);
    CHECK(std::isnan(r.z_over_ls));
  }
  CHECK(rows.front().z_um == 0.0);
  CHECK(rows.back().z_um == 75.0);
}

TEST_CASE("bins without emitters are omitted and stderr follows the sample spread") {
  const GridSpec g = small_grid();
  const std::vector<Emitter> truth = {{0.0, 0.0, g.z_of_plane(1), 15.0, 0.8}};
  const std::vector<Detection> hit = {at(truth[0])};
  const std::vector<DetectionReport> reports = {score(hit, truth, g, {}), score({}, truth, g, {})};
  const auto rows = f1_vs_depth(reports, 160.0, g.z0_um);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].z_um == 25.0);
  CHECK(rows[0].f1 == 0.5);
  CHECK(rows[0].stderr_f1 == doctest::Approx(0.5));  // sd sqrt(0.5) over sqrt(2)
  CHECK(rows[0].tp == 1);
  CHECK(rows[0].fn == 1);
}

TEST_CASE("curve CSV header and layout") {
  CurveRow r;
  r.z_um = 25.0;
  r.z_over_ls = 0.3125;
  r.tp = 3;
  r.f1 = 1.0;
  const std::vector<CurveRow> rows = {r};
  const std::string csv = curve_csv(rows);
  CHECK(csv.rfind("z_um,z_over_ls,tp,fp,fn,precision,recall,f1,stderr\n", 0) == 0);
  CHECK(csv.find("25,0.3125,3,0,0,0,0,1,0\n") != std::string::npos);
}

TEST_CASE("false positives are binned by their own depth") {
  const GridSpec g = small_grid();
  const std::vector<Emitter> truth = {{0.0, 0.0, g.z_of_plane(0), 15.0, 0.8}};
  const std::vector<Detection> dets = {at(truth[0]), {30.0, 30.0, g.z_of_plane(3), 1.0}};
  const DetectionReport r = score(dets, truth, g, {});
  CHECK(r.bins[0].tp == 1);
  CHECK(r.bins[3].fp == 1);
  CHECK(r.bins[3].emitters == 0);
}

TEST_CASE("match config validation") {
  MatchConfig c;
  c.intensity_threshold = 1.0;
  CHECK(sf_test::error_kind_of([&] { c.validate(); }) == ErrorKind::invalid_argument);
  c = MatchConfig{};
  c.lateral_tol_um = 0.0;
  CHECK(sf_test::error_kind_of([&] { c.validate(); }) == ErrorKind::invalid_argument);
  CHECK(matcher_from_string("greedy") == Matcher::greedy);
  CHECK(sf_test::error_kind_of([] { matcher_from_string("auction"); }) == ErrorKind::invalid_argument);
}

TEST_CASE("identical patches have zero scores") {
  const std::vector<std::vector<double>> p(6, std::vector<double>(kPatchSize * kPatchSize, 0.3));
  const PcaModel m = fit_pca(p);
  for (const auto& s : m.scores)
    for (double v : s) CHECK(v == 0.0);
}

TEST_CASE("rank-one patch set has no second component") {
  std::uint64_t s = 12;
  const auto tpl = random_patches(3, 1, 1024).front();
  std::vector<std::vector<double>> p;
  for (int i = 0; i < 8; ++i) {
    const double a = static_cast<double>(uniform_below(s, 1000)) / 100.0;
    std::vector<double> v(1024);
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = 0.2 + a * tpl[j];
    p.push_back(std::move(v));
  }
  const PcaModel m = fit_pca(p);
  for (const auto& sc : m.scores) CHECK(std::abs(sc[1]) <= 1e-8);
  CHECK(m.variances[0] > 0.0);
}

TEST_CASE("reconstruction error falls with k and vanishes at nine components") {
  const auto p = random_patches(44, 10, 1024);
  const PcaModel m = fit_pca(p);
  REQUIRE(m.axes.size() == 9);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= 9; ++k) {
    const double err = reconstruction_error(p, m, k);
    CHECK(err <= prev + 1e-9);
    prev = err;
  }
  CHECK(reconstruction_error(p, m, 9) <= 1e-9 * reconstruction_error(p, m, 0));
  for (std::size_t k = 1; k < m.variances.size(); ++k) CHECK(m.variances[k] <= m.variances[k - 1]);
}

TEST_CASE("patch scores are invariant under reordering up to sign") {
  const auto p = random_patches(45, 7, 1024);
  auto q = p;
  std::reverse(q.begin(), q.end());
  const PcaModel a = fit_pca(p), b = fit_pca(q);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t k = 0; k < 2; ++k)
      CHECK(std::abs(a.scores[i][k]) == doctest::Approx(std::abs(b.scores[p.size() - 1 - i][k])).epsilon(1e-9));
}

TEST_CASE("patch near the border and single patch are rejected") {
  const std::vector<Image> imgs = {Image(64, 64, 1.0)};
  const std::vector<PatchSite> bad = {{0, 15, 32, "a"}};
  CHECK(sf_test::error_kind_of([&] { extract_patches(imgs, bad); }) == ErrorKind::invalid_argument);
  const std::vector<PatchSite> one = {{0, 32, 32, "a"}};
  CHECK(sf_test::error_kind_of([&] { pca_patches(imgs, one); }) == ErrorKind::invalid_argument);
  const std::vector<PatchSite> edge = {{0, 16, 16, "a"}, {0, 48, 48, "b"}};
  CHECK(pca_patches(imgs, edge).size() == 2);
}

TEST_CASE("PCA CSV lists domain and two scores") {
  sf_test::TempDir dir("pca");
  const std::vector<PcaRow> rows = {{"free_space", 1.5, -0.25}, {"scattering", 0.0, 2.0}};
  write_pca_csv(dir / "p.csv", rows);
  std::ifstream in(dir / "p.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "domain,pc1,pc2");
  std::getline(in, line);
  CHECK(line == "free_space,1.5,-0.25");
}

}  // TEST_SUITE
