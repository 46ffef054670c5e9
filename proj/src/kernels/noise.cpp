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

#include <cmath>
#include <random>

#include "scatterfield/error.hpp"
#include "scatterfield/kernels.hpp"
#include "scatterfield/rng.hpp"

namespace scatterfield::kernels {

void add_mpg_noise(Image& g, double a, double b, std::uint64_t seed, bool clip_at_zero) {
  const long rows = static_cast<long>(g.rows());
  for (double v : g.values())
    if (!(a * v + b >= 0.0)) fail(ErrorKind::invalid_argument, "apply_mpg_noise: a*g + b < 0 at some pixel");

#pragma omp parallel for schedule(static)
  for (long r = 0; r < rows; ++r) {
    Engine engine(derive_seed(seed, {static_cast<std::uint64_t>(r)}));
    std::normal_distribution<double> xi(0.0, 1.0);
    for (double& v : g.row(static_cast<std::size_t>(r))) {
      v += std::sqrt(a * v + b) * xi(engine);
      if (clip_at_zero && v < 0.0) v = 0.0;
    }
  }
}

}  // namespace scatterfield::kernels
