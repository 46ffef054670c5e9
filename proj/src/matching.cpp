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
#include <limits>
#include <numeric>
#include <tuple>

#include "scatterfield/error.hpp"
#include "scatterfield/metrics.hpp"

namespace scatterfield {

std::string to_string(Matcher m) { return m == Matcher::hungarian ? "hungarian" : "greedy"; }

Matcher matcher_from_string(const std::string& s) {
  if (s == "hungarian") return Matcher::hungarian;
  if (s == "greedy") return Matcher::greedy;
  fail(ErrorKind::invalid_argument, "unknown matcher \"" + s + "\"");
}

void MatchConfig::validate() const {
  require(intensity_threshold > 0.0 && intensity_threshold < 1.0, ErrorKind::invalid_argument,
          "match config: intensity threshold must lie in (0, 1)");
  require(lateral_tol_um > 0.0 && axial_tol_um > 0.0, ErrorKind::invalid_argument,
          "match config: tolerances must be positive");
}

namespace {

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
  std::vector<std::size_t> parent;
};

// Minimum-cost assignment of every row to a distinct column (rows <= cols),
// shortest augmenting path with potentials. Returns the column of each row.
std::vector<std::size_t> solve_assignment(const std::vector<std::vector<double>>& a) {
  const std::size_t n = a.size();
  const std::size_t m = n ? a[0].size() : 0;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> col_of(n, 0);
  for (std::size_t j = 1; j <= m; ++j)
    if (p[j] != 0) col_of[p[j] - 1] = j - 1;
  return col_of;
}

}  // namespace

Assignment match_pairs(std::size_t detections, std::size_t truths, const std::vector<std::vector<char>>& valid,
                       const std::vector<std::vector<double>>& cost, Matcher matcher) {
  std::vector<char> det_used(detections, 0), truth_used(truths, 0);
  Assignment out;

  if (matcher == Matcher::greedy) {
    std::vector<std::tuple<double, std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < detections; ++i)
      for (std::size_t j = 0; j < truths; ++j)
        if (valid[i][j]) edges.emplace_back(cost[i][j], i, j);
    std::sort(edges.begin(), edges.end());
    for (const auto& [c, i, j] : edges) {
      if (det_used[i] || truth_used[j]) continue;
      det_used[i] = truth_used[j] = 1;
      out.pairs.emplace_back(i, j);
    }
  } else {
    // Solve each connected component of the admissibility graph separately.
    DisjointSets sets(detections + truths);
    for (std::size_t i = 0; i < detections; ++i)
      for (std::size_t j = 0; j < truths; ++j)
        if (valid[i][j]) sets.unite(i, detections + j);
    std::vector<std::vector<std::size_t>> comp_dets(detections + truths), comp_truths(detections + truths);
    for (std::size_t i = 0; i < detections; ++i) comp_dets[sets.find(i)].push_back(i);
    for (std::size_t j = 0; j < truths; ++j) comp_truths[sets.find(detections + j)].push_back(j);

    for (std::size_t c = 0; c < comp_dets.size(); ++c) {
      const auto& ds = comp_dets[c];
      const auto& ts = comp_truths[c];
      if (ds.empty() || ts.empty()) continue;
      const bool transpose = ds.size() > ts.size();
      const auto& rows = transpose ? ts : ds;
      const auto& cols = transpose ? ds : ts;
      double max_valid = 0.0;
      for (std::size_t i : ds)
        for (std::size_t j : ts)
          if (valid[i][j]) max_valid = std::max(max_valid, cost[i][j]);
      // An inadmissible pair costs more than any full set of admissible ones, so the
      // optimum has the most admissible pairs.
      const double big = (max_valid + 1.0) * static_cast<double>(rows.size() + 1);
      std::vector<std::vector<double>> a(rows.size(), std::vector<double>(cols.size()));
      for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t q = 0; q < cols.size(); ++q) {
          const std::size_t i = transpose ? cols[q] : rows[r];
          const std::size_t j = transpose ? rows[r] : cols[q];
          a[r][q] = valid[i][j] ? cost[i][j] : big;
        }
      const std::vector<std::size_t> col_of = solve_assignment(a);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::size_t i = transpose ? cols[col_of[r]] : rows[r];
        const std::size_t j = transpose ? rows[r] : cols[col_of[r]];
        if (!valid[i][j]) continue;
        det_used[i] = truth_used[j] = 1;
        out.pairs.emplace_back(i, j);
      }
    }
    std::sort(out.pairs.begin(), out.pairs.end());
  }

  for (std::size_t i = 0; i < detections; ++i)
    if (!det_used[i]) out.unmatched_detections.push_back(i);
  for (std::size_t j = 0; j < truths; ++j)
    if (!truth_used[j]) out.unmatched_truth.push_back(j);
  return out;
}

Assignment match_detections(std::span<const Detection> detections, std::span<const Emitter> truth,
                            const MatchConfig& cfg) {
  cfg.validate();
  std::vector<std::vector<char>> valid(detections.size(), std::vector<char>(truth.size(), 0));
  std::vector<std::vector<double>> cost(detections.size(), std::vector<double>(truth.size(), 0.0));
  for (std::size_t i = 0; i < detections.size(); ++i)
    for (std::size_t j = 0; j < truth.size(); ++j) {
      const double lateral = std::hypot(detections[i].x_um - truth[j].x_um, detections[i].y_um - truth[j].y_um);
      const double axial = std::abs(detections[i].z_um - truth[j].z_um);
      if (lateral > cfg.lateral_tol_um || axial > cfg.axial_tol_um) continue;
      valid[i][j] = 1;
      const double nl = lateral / cfg.lateral_tol_um;
      const double na = axial / cfg.axial_tol_um;
      cost[i][j] = nl * nl + na * na;
    }
  return match_pairs(detections.size(), truth.size(), valid, cost, cfg.matcher);
}

}  // namespace scatterfield
