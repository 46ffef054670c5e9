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

#include <cstddef>
#include <span>
#include <vector>

namespace scatterfield {

struct Shape2 {
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t size() const noexcept { return rows * cols; }
  friend bool operator==(const Shape2&, const Shape2&) = default;
};

/// Row-major 2D image of doubles.
class Image {
 public:
  Image() = default;
  Image(std::size_t rows, std::size_t cols, double fill = 0.0)
      : shape_{rows, cols}, data_(rows * cols, fill) {}
  explicit Image(Shape2 shape, double fill = 0.0) : Image(shape.rows, shape.cols, fill) {}

  Shape2 shape() const noexcept { return shape_; }
  std::size_t rows() const noexcept { return shape_.rows; }
  std::size_t cols() const noexcept { return shape_.cols; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * shape_.cols + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * shape_.cols + c];
  }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * shape_.cols, shape_.cols}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * shape_.cols, shape_.cols};
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  Shape2 shape_;
  std::vector<double> data_;
};

/// Plane-major (z, y, x) 3D grid of doubles.
class Grid3 {
 public:
  Grid3() = default;
  Grid3(std::size_t planes, std::size_t rows, std::size_t cols, double fill = 0.0)
      : planes_(planes), rows_(rows), cols_(cols), data_(planes * rows * cols, fill) {}

  std::size_t planes() const noexcept { return planes_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  Shape2 plane_shape() const noexcept { return {rows_, cols_}; }
  std::size_t plane_size() const noexcept { return rows_ * cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t k, std::size_t r, std::size_t c) noexcept {
    return data_[(k * rows_ + r) * cols_ + c];
  }
  double operator()(std::size_t k, std::size_t r, std::size_t c) const noexcept {
    return data_[(k * rows_ + r) * cols_ + c];
  }

  std::span<double> plane(std::size_t k) noexcept { return {data_.data() + k * plane_size(), plane_size()}; }
  std::span<const double> plane(std::size_t k) const noexcept {
    return {data_.data() + k * plane_size(), plane_size()};
  }
  Image plane_image(std::size_t k) const;

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  friend bool operator==(const Grid3&, const Grid3&) = default;

 private:
  std::size_t planes_ = 0;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double max_value(std::span<const double> values) noexcept;
double sum_values(std::span<const double> values) noexcept;
double mean_value(std::span<const double> values) noexcept;

/// Divides by the maximum so values land in [0, 1]. Returns the divisor
/// (0 when the input is all zero, in which case it is left untouched).
double normalize_by_max(std::span<double> values) noexcept;

}  // namespace scatterfield
