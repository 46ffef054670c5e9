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

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "scatterfield/grid.hpp"

namespace scatterfield {

using Json = nlohmann::json;

// SBRB stack container:
//   "SBRB" | version u8 = 1 | header_len u32 LE | header JSON (UTF-8) | f32 LE payload
inline constexpr std::array<char, 4> kStackMagic{'S', 'B', 'R', 'B'};
inline constexpr std::uint8_t kStackVersion = 1;
inline constexpr std::size_t kStackPreambleBytes = 9;

struct StackHeader {
  std::vector<std::size_t> shape;
  std::string axes;  // "z,y,x", "c,y,x" or "y,x"
  double pixel_pitch_um = 0.0;
  double z0_um = 0.0;
  double dz_um = 0.0;
  Json meta = Json::object();

  std::size_t element_count() const noexcept;
  /// Throws Error(bad_header) if axes and shape disagree in rank or a dimension is 0.
  void validate() const;
  Json to_json() const;
  static StackHeader from_json(const Json& j);
};

struct Stack {
  StackHeader header;
  std::vector<float> data;
};

/// Reorders `count` 4-byte words from `order` to little-endian (the operation is
/// its own inverse, so it also converts LE words back to `order`).
void swap_words_to_le(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, std::endian order);

std::vector<std::uint8_t> encode_stack(const Stack& stack);
/// `source` names the data in error messages (usually the file path).
Stack decode_stack(std::span<const std::uint8_t> bytes, std::string_view source);

/// Writes the encoded stack and fsyncs it before returning.
void write_stack(const std::filesystem::path& path, const Stack& stack);
/// Validates magic, version and lengths before reading the payload.
Stack read_stack(const std::filesystem::path& path);

Stack stack_from_image(const Image& img, double pixel_pitch_um, Json meta = Json::object());
Stack stack_from_grid(const Grid3& grid, std::string axes, double pixel_pitch_um, double z0_um, double dz_um,
                      Json meta = Json::object());
Image image_from_stack(const Stack& stack);
Grid3 grid_from_stack(const Stack& stack);

/// Float32 grey-scale TIFF (one page per plane) for viewing in microscopy tools.
void export_tiff(const std::filesystem::path& path, const Stack& stack);

}  // namespace scatterfield
