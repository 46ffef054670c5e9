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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "scatterfield/error.hpp"
#include "scatterfield/metrics.hpp"

namespace scatterfield {

std::vector<std::vector<double>> extract_patches(std::span<const Image> images, std::span<const PatchSite> sites,
                                                 std::size_t size) {
  const long half = static_cast<long>(size / 2);
  std::vector<std::vector<double>> patches;
  patches.reserve(sites.size());
  for (std::size_t s = 0; s < sites.size(); ++s) {
    const PatchSite& site = sites[s];
    require(site.image < images.size(), ErrorKind::invalid_argument,
            "pca: patch " + std::to_string(s) + " refers to a missing image");
    const Image& img = images[site.image];
    if (site.row - half < 0 || site.col - half < 0 || site.row - half + static_cast<long>(size) > static_cast<long>(img.rows()) ||
        site.col - half + static_cast<long>(size) > static_cast<long>(img.cols()))
      fail(ErrorKind::invalid_argument, "pca: patch " + std::to_string(s) + " lies closer than " +
                                            std::to_string(half) + " px to the image border");
    std::vector<double> patch;
    patch.reserve(size * size);
    for (std::size_t r = 0; r < size; ++r) {
      auto row = img.row(static_cast<std::size_t>(site.row - half) + r);
      patch.insert(patch.end(), row.begin() + (site.col - half), row.begin() + (site.col - half) + static_cast<long>(size));
    }
    patches.push_back(std::move(patch));
  }
  return patches;
}

PcaModel fit_pca(const std::vector<std::vector<double>>& patches) {
  require(patches.size() >= 2, ErrorKind::invalid_argument, "pca: need at least two patches");
  const std::size_t n = patches.size();
  const std::size_t d = patches.front().size();
  for (const auto& p : patches) require(p.size() == d, ErrorKind::shape_mismatch, "pca: patches differ in size");

  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = patches[i][j];
  const Eigen::RowVectorXd mu = x.colwise().mean();
  x.rowwise() -= mu;

  // Eigenvectors of the n x n Gram matrix give the same scores as the d x d
  // covariance when there are fewer patches than pixels.
  const std::size_t rank_bound = std::min(n - 1, d);
  Eigen::VectorXd lambda;
  Eigen::MatrixXd score_vecs;  // columns: unit score directions (n-dim)
  Eigen::MatrixXd axis_vecs;   // columns: unit axes (d-dim)
  if (n <= d) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x * x.transpose());
    lambda = es.eigenvalues().reverse();
    score_vecs = es.eigenvectors().rowwise().reverse();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x.transpose() * x);
    lambda = es.eigenvalues().reverse();
    axis_vecs = es.eigenvectors().rowwise().reverse();
  }
  const double top = std::max(0.0, lambda.size() ? lambda(0) : 0.0);
  const double tol = top * 1e-12;

  PcaModel model;
  model.mean.assign(mu.data(), mu.data() + d);
  model.scores.assign(n, std::vector<double>(rank_bound, 0.0));
  for (std::size_t k = 0; k < rank_bound; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const double lk = lambda(kk) > tol ? lambda(kk) : 0.0;
    Eigen::VectorXd axis;
    Eigen::VectorXd s;
    if (lk == 0.0) {
      axis = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
      axis(std::min<Eigen::Index>(kk, static_cast<Eigen::Index>(d) - 1)) = 1.0;
      s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    } else if (n <= d) {
      axis = x.transpose() * score_vecs.col(kk) / std::sqrt(lk);
      s = score_vecs.col(kk) * std::sqrt(lk);
    } else {
      axis = axis_vecs.col(kk);
      s = x * axis;
    }
    // Fix the sign so the largest-magnitude axis component is positive.
    Eigen::Index arg = 0;
    axis.cwiseAbs().maxCoeff(&arg);
    if (axis(arg) < 0.0) {
      axis = -axis;
      s = -s;
    }
    model.axes.emplace_back(axis.data(), axis.data() + d);
    model.variances.push_back(lk / static_cast<double>(n - 1));
    for (std::size_t i = 0; i < n; ++i) model.scores[i][k] = s(static_cast<Eigen::Index>(i));
  }
  return model;
}

double reconstruction_error(const std::vector<std::vector<double>>& patches, const PcaModel& model, std::size_t k) {
  k = std::min(k, model.axes.size());
  double total = 0.0;
  const std::size_t d = model.mean.size();
  std::vector<double> centred(d);
  for (const auto& p : patches) {
    for (std::size_t j = 0; j < d; ++j) centred[j] = p[j] - model.mean[j];
    for (std::size_t a = 0; a < k; ++a) {
      double proj = 0.0;
      for (std::size_t j = 0; j < d; ++j) proj += centred[j] * model.axes[a][j];
      for (std::size_t j = 0; j < d; ++j) centred[j] -= proj * model.axes[a][j];
    }
    for (double v : centred) total += v * v;
  }
  return total;
}

std::vector<PcaRow> pca_patches(std::span<const Image> images, std::span<const PatchSite> sites) {
  const PcaModel model = fit_pca(extract_patches(images, sites));
  std::vector<PcaRow> rows(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) {
    rows[i].domain = sites[i].domain;
    rows[i].pc1 = model.scores[i].size() > 0 ? model.scores[i][0] : 0.0;
    rows[i].pc2 = model.scores[i].size() > 1 ? model.scores[i][1] : 0.0;
  }
  return rows;
}

}  // namespace scatterfield
