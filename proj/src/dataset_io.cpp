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

#include "scatterfield/dataset_io.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <functional>
#include <numeric>

#include "scatterfield/error.hpp"

namespace scatterfield {
namespace {

void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32le(const std::uint8_t* p) noexcept {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

[[noreturn]] void io_error(const std::filesystem::path& path, const char* what) {
  fail(ErrorKind::io, path.string() + ": " + what + ": " + std::strerror(errno));
}

std::size_t rank_of(std::string_view axes) {
  if (axes == "y,x") return 2;
  if (axes == "z,y,x" || axes == "c,y,x") return 3;
  return 0;
}

}  // namespace

std::size_t StackHeader::element_count() const noexcept {
  if (shape.empty()) return 0;
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

void StackHeader::validate() const {
  const std::size_t rank = rank_of(axes);
  require(rank != 0, ErrorKind::bad_header, "stack header: unknown axes \"" + axes + "\"");
  require(shape.size() == rank, ErrorKind::bad_header,
          "stack header: axes \"" + axes + "\" need rank " + std::to_string(rank) + ", shape has " +
              std::to_string(shape.size()));
  for (std::size_t d : shape) require(d > 0, ErrorKind::bad_header, "stack header: zero-length dimension");
  require(meta.is_object(), ErrorKind::bad_header, "stack header: meta must be an object");
}

Json StackHeader::to_json() const {
  return Json{{"dtype", "f32le"}, {"shape", shape},   {"axes", axes}, {"pixel_pitch_um", pixel_pitch_um},
              {"z0_um", z0_um},   {"dz_um", dz_um},   {"meta", meta}};
}

StackHeader StackHeader::from_json(const Json& j) {
  StackHeader h;
  try {
    if (j.at("dtype").get<std::string>() != "f32le") fail(ErrorKind::bad_header, "stack header: dtype must be f32le");
    h.shape = j.at("shape").get<std::vector<std::size_t>>();
    h.axes = j.at("axes").get<std::string>();
    h.pixel_pitch_um = j.value("pixel_pitch_um", 0.0);
    h.z0_um = j.value("z0_um", 0.0);
    h.dz_um = j.value("dz_um", 0.0);
    h.meta = j.value("meta", Json::object());
  } catch (const Json::exception& e) {
    fail(ErrorKind::bad_header, std::string("stack header: ") + e.what());
  }
  h.validate();
  return h;
}

void swap_words_to_le(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, std::endian order) {
  require(in.size() == out.size() && in.size() % 4 == 0, ErrorKind::invalid_argument,
          "swap_words_to_le: buffers must hold whole 4-byte words of equal count");
  if (order == std::endian::little) {
    std::copy(in.begin(), in.end(), out.begin());
    return;
  }
  for (std::size_t i = 0; i < in.size(); i += 4) {
    out[i] = in[i + 3];
    out[i + 1] = in[i + 2];
    out[i + 2] = in[i + 1];
    out[i + 3] = in[i];
  }
}

std::vector<std::uint8_t> encode_stack(const Stack& stack) {
  stack.header.validate();
  require(stack.data.size() == stack.header.element_count(), ErrorKind::shape_mismatch,
          "encode_stack: payload has " + std::to_string(stack.data.size()) + " values, header shape needs " +
              std::to_string(stack.header.element_count()));
  const std::string header = stack.header.to_json().dump();
  std::vector<std::uint8_t> out;
  out.reserve(kStackPreambleBytes + header.size() + 4 * stack.data.size());
  out.insert(out.end(), kStackMagic.begin(), kStackMagic.end());
  out.push_back(kStackVersion);
  put_u32le(out, static_cast<std::uint32_t>(header.size()));
  out.insert(out.end(), header.begin(), header.end());
  const std::size_t payload_at = out.size();
  out.resize(payload_at + 4 * stack.data.size());
  const auto* native = reinterpret_cast<const std::uint8_t*>(stack.data.data());
  swap_words_to_le({native, 4 * stack.data.size()}, {out.data() + payload_at, 4 * stack.data.size()},
                   std::endian::native);
  return out;
}

Stack decode_stack(std::span<const std::uint8_t> bytes, std::string_view source) {
  const std::string where(source);
  if (bytes.size() < kStackPreambleBytes)
    fail(ErrorKind::truncated, where + ": file too short for the stack preamble (" + std::to_string(bytes.size()) +
                                   " of " + std::to_string(kStackPreambleBytes) + " bytes)");
  if (!std::equal(kStackMagic.begin(), kStackMagic.end(), bytes.begin()))
    fail(ErrorKind::bad_magic, where + ": not an SBRB stack file (bad magic)");
  if (bytes[4] != kStackVersion)
    fail(ErrorKind::unsupported_version, where + ": unsupported stack version " + std::to_string(bytes[4]));
  const std::size_t header_len = get_u32le(bytes.data() + 5);
  if (bytes.size() < kStackPreambleBytes + header_len)
    fail(ErrorKind::truncated, where + ": header truncated (expected " + std::to_string(header_len) +
                                   " header bytes, file has " +
                                   std::to_string(bytes.size() - kStackPreambleBytes) + ")");
  const auto* header_begin = reinterpret_cast<const char*>(bytes.data() + kStackPreambleBytes);
  Json j = Json::parse(header_begin, header_begin + header_len, nullptr, false);
  if (j.is_discarded()) fail(ErrorKind::bad_header, where + ": header is not valid JSON");

  Stack stack;
  try {
    stack.header = StackHeader::from_json(j);
  } catch (const Error& e) {
    fail(e.kind(), where + ": " + e.what());
  }
  const std::size_t expected = 4 * stack.header.element_count();
  const std::size_t actual = bytes.size() - kStackPreambleBytes - header_len;
  if (actual != expected)
    fail(ErrorKind::truncated, where + ": payload size mismatch (expected " + std::to_string(expected) +
                                   " bytes, found " + std::to_string(actual) + ")");
  stack.data.resize(stack.header.element_count());
  auto* native = reinterpret_cast<std::uint8_t*>(stack.data.data());
  swap_words_to_le(bytes.subspan(kStackPreambleBytes + header_len), {native, expected}, std::endian::native);
  return stack;
}

void write_stack(const std::filesystem::path& path, const Stack& stack) {
  const std::vector<std::uint8_t> bytes = encode_stack(stack);
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) io_error(path, "open for writing failed");
  std::size_t done = 0;
  while (done < bytes.size()) {
    const ssize_t n = ::write(fd, bytes.data() + done, bytes.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      const int saved = errno;
      ::close(fd);
      errno = saved;
      io_error(path, "write failed");
    }
    done += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    const int saved = errno;
    ::close(fd);
    errno = saved;
    io_error(path, "fsync failed");
  }
  if (::close(fd) != 0) io_error(path, "close failed");
}

Stack read_stack(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error(path, "open failed");
  std::array<std::uint8_t, kStackPreambleBytes> preamble{};
  in.read(reinterpret_cast<char*>(preamble.data()), preamble.size());
  const auto got = static_cast<std::size_t>(in.gcount());
  // Check the preamble before trusting header_len for any allocation.
  if (got < kStackPreambleBytes) return decode_stack({preamble.data(), got}, path.string());
  if (!std::equal(kStackMagic.begin(), kStackMagic.end(), preamble.begin()) || preamble[4] != kStackVersion)
    return decode_stack(preamble, path.string());

  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) fail(ErrorKind::io, path.string() + ": cannot stat: " + ec.message());
  const std::size_t header_len = get_u32le(preamble.data() + 5);
  if (size < kStackPreambleBytes + header_len)
    fail(ErrorKind::truncated, path.string() + ": header truncated (expected " + std::to_string(header_len) +
                                   " header bytes, file has " + std::to_string(size - kStackPreambleBytes) + ")");
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
  std::copy(preamble.begin(), preamble.end(), bytes.begin());
  in.read(reinterpret_cast<char*>(bytes.data() + kStackPreambleBytes),
          static_cast<std::streamsize>(bytes.size() - kStackPreambleBytes));
  if (static_cast<std::size_t>(in.gcount()) != bytes.size() - kStackPreambleBytes)
    fail(ErrorKind::io, path.string() + ": short read");
  return decode_stack(bytes, path.string());
}

Stack stack_from_image(const Image& img, double pixel_pitch_um, Json meta) {
  Stack s;
  s.header.shape = {img.rows(), img.cols()};
  s.header.axes = "y,x";
  s.header.pixel_pitch_um = pixel_pitch_um;
  s.header.meta = std::move(meta);
  s.data.assign(img.values().begin(), img.values().end());
  return s;
}

Stack stack_from_grid(const Grid3& grid, std::string axes, double pixel_pitch_um, double z0_um, double dz_um,
                      Json meta) {
  Stack s;
  s.header.shape = {grid.planes(), grid.rows(), grid.cols()};
  s.header.axes = std::move(axes);
  s.header.pixel_pitch_um = pixel_pitch_um;
  s.header.z0_um = z0_um;
  s.header.dz_um = dz_um;
  s.header.meta = std::move(meta);
  s.data.assign(grid.values().begin(), grid.values().end());
  return s;
}

Image image_from_stack(const Stack& stack) {
  require(stack.header.shape.size() == 2, ErrorKind::shape_mismatch,
          "expected a 2D (y,x) stack, found axes " + stack.header.axes);
  Image img(stack.header.shape[0], stack.header.shape[1]);
  std::copy(stack.data.begin(), stack.data.end(), img.values().begin());
  return img;
}

Grid3 grid_from_stack(const Stack& stack) {
  require(stack.header.shape.size() == 3, ErrorKind::shape_mismatch,
          "expected a 3D stack, found axes " + stack.header.axes);
  Grid3 grid(stack.header.shape[0], stack.header.shape[1], stack.header.shape[2]);
  std::copy(stack.data.begin(), stack.data.end(), grid.values().begin());
  return grid;
}

}  // namespace scatterfield
