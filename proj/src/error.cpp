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

#include "scatterfield/error.hpp"

namespace scatterfield {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::invalid_recipe: return "invalid_recipe";
    case ErrorKind::geometry: return "geometry";
    case ErrorKind::shape_mismatch: return "shape_mismatch";
    case ErrorKind::bad_magic: return "bad_magic";
    case ErrorKind::unsupported_version: return "unsupported_version";
    case ErrorKind::truncated: return "truncated";
    case ErrorKind::bad_header: return "bad_header";
    case ErrorKind::format: return "format";
    case ErrorKind::io: return "io";
    case ErrorKind::data: return "data";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace scatterfield
