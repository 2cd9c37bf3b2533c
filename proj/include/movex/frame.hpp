// Copyright 2026 The Movex Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MOVEX_FRAME_HPP_
#define MOVEX_FRAME_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace movex {

// Dense row-major pixel plane; row = y, column = x.
template <typename Scalar>
using Plane =
    Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using LumaPlane = Plane<std::uint8_t>;

// One video frame: an 8-bit luma plane plus its 0-based sequence index.
struct Frame {
  int index = 0;
  LumaPlane luma;

  int width() const { return static_cast<int>(luma.cols()); }
  int height() const { return static_cast<int>(luma.rows()); }
};

// Integer BT.601 luma with round-half-up: (299 R + 587 G + 114 B + 500) / 1000.
std::uint8_t bt601_luma(int r, int g, int b);

// Reads a binary PNM image (P5 grayscale or P6 color; P6 is converted to luma
// via bt601_luma). Throws ParseError on malformed content.
Frame read_pnm(std::istream& in, int index);
Frame read_pnm(const std::filesystem::path& path, int index);

// Writes the luma plane as a binary PGM (P5, maxval 255).
void write_pgm(const Frame& frame, std::ostream& out);
void write_pgm(const Frame& frame, const std::filesystem::path& path);

// Loads every .pgm/.ppm file in a directory in lexicographic filename order
// and assigns frame indices 0..n-1. Throws InvalidInputError if the directory
// holds no frames or the frames disagree in size.
std::vector<Frame> load_frame_dir(const std::filesystem::path& dir);

}  // namespace movex

#endif  // MOVEX_FRAME_HPP_
