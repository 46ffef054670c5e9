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

#include <fstream>

#include "scatterfield/dataset_io.hpp"
#include "scatterfield/error.hpp"

namespace scatterfield {
namespace {

void put16(std::vector<std::uint8_t>& b, std::uint16_t v) {
  b.push_back(static_cast<std::uint8_t>(v));
  b.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void entry(std::vector<std::uint8_t>& b, std::uint16_t tag, std::uint16_t type, std::uint32_t value) {
  put16(b, tag);
  put16(b, type);
  put32(b, 1);
  if (type == 3) {
    put16(b, static_cast<std::uint16_t>(value));
    put16(b, 0);
  } else {
    put32(b, value);
  }
}

}  // namespace

void export_tiff(const std::filesystem::path& path, const Stack& stack) {
  stack.header.validate();
  const auto& shape = stack.header.shape;
  const std::size_t pages = shape.size() == 3 ? shape[0] : 1;
  const std::size_t rows = shape[shape.size() - 2];
  const std::size_t cols = shape.back();
  const std::size_t page_bytes = 4 * rows * cols;
  require(8 + pages * (page_bytes + 2 + 10 * 12 + 4) < (std::size_t{1} << 32), ErrorKind::invalid_argument,
          "export_tiff: stack too large for classic TIFF");

  std::vector<std::uint8_t> b{'I', 'I', 42, 0};
  put32(b, 8);
  for (std::size_t p = 0; p < pages; ++p) {
    const std::uint32_t ifd_at = static_cast<std::uint32_t>(b.size());
    const std::uint32_t data_at = ifd_at + 2 + 10 * 12 + 4;
    put16(b, 10);
    entry(b, 256, 4, static_cast<std::uint32_t>(cols));
    entry(b, 257, 4, static_cast<std::uint32_t>(rows));
    entry(b, 258, 3, 32);
    entry(b, 259, 3, 1);
    entry(b, 262, 3, 1);
    entry(b, 273, 4, data_at);
    entry(b, 277, 3, 1);
    entry(b, 278, 4, static_cast<std::uint32_t>(rows));
    entry(b, 279, 4, static_cast<std::uint32_t>(page_bytes));
    entry(b, 339, 3, 3);
    const bool last = p + 1 == pages;
    put32(b, last ? 0 : static_cast<std::uint32_t>(data_at + page_bytes));
    const std::size_t at = b.size();
    b.resize(at + page_bytes);
    const auto* native = reinterpret_cast<const std::uint8_t*>(stack.data.data() + p * rows * cols);
    swap_words_to_le({native, page_bytes}, {b.data() + at, page_bytes}, std::endian::native);
  }

  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
  require(static_cast<bool>(out), ErrorKind::io, "write failed: " + path.string());
}

}  // namespace scatterfield
