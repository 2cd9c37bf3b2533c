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

#ifndef MOVEX_MOTION_HPP_
#define MOVEX_MOTION_HPP_

#include <Eigen/Core>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "movex/frame.hpp"

namespace movex {

// Per-block displacement in pixels. (dx, dy) is the motion of image content
// from the source frame to the destination frame: the block at (x, y) in the
// destination matches the patch at (x - dx, y - dy) in the source.
struct MotionVector {
  int dx = 0;
  int dy = 0;

  bool operator==(const MotionVector&) const = default;
};

// Grid of motion vectors describing motion from frame src_index to
// src_index + 1. The grid is row-major over macroblocks; blocks at the right
// and bottom edges may be narrower than block_size.
struct MotionVectorField {
  int src_index = 0;
  int frame_width = 0;
  int frame_height = 0;
  int block_size = 16;
  Eigen::ArrayXXi dx;  // grid_height rows x grid_width cols
  Eigen::ArrayXXi dy;

  int dst_index() const { return src_index + 1; }
  int grid_width() const { return static_cast<int>(dx.cols()); }
  int grid_height() const { return static_cast<int>(dx.rows()); }

  MotionVector at(int row, int col) const { return {dx(row, col), dy(row, col)}; }

  // Pixel center of the block in cell (row, col); edge blocks use the center
  // of their clipped extent.
  Eigen::Vector2d block_center(int row, int col) const;

  // Throws InvalidInputError unless the grid shape matches the frame
  // dimensions and block size.
  void validate() const;
};

// Expected grid cell count along one axis: ceil(extent / block_size).
int grid_cells(int extent, int block_size);

enum class SearchMethod {
  kFullSearch,  // exhaustive scan of the whole search window
  kThreeStep,   // classic three-step search, log-time approximation
};

struct MotionEstimatorParams {
  int block_size = 16;
  int search_range = 16;  // displacement bound per axis, in pixels
  SearchMethod method = SearchMethod::kFullSearch;
  // Subtracted from the zero-displacement candidate's mean absolute
  // difference, biasing ties and near-ties toward (0, 0).
  double zero_bias = 0.0;

  void validate() const;
};

// Estimates the motion field from prev to cur by minimizing the mean absolute
// difference per block. Candidates that would read outside the source frame
// are skipped; (0, 0) is always valid. Exact cost ties are broken by smallest
// |dx|+|dy|, then smallest dy, then smallest dx, which makes the result
// independent of candidate evaluation order. Deterministic: identical inputs
// give bit-identical fields.
MotionVectorField estimate_motion(const Frame& prev, const Frame& cur,
                                  const MotionEstimatorParams& params = {});

// MVF sidecar format: a plain text header "MVF 1 <frame_w> <frame_h>
// <block_size> <num_fields>" followed for each field by "FIELD <src_index>"
// and grid_h * grid_w lines of "<dx> <dy>" in row-major order. Fields must be
// strictly increasing in src_index. ParseError messages carry line numbers.
std::vector<MotionVectorField> read_mvf(std::istream& in);
std::vector<MotionVectorField> read_mvf(const std::filesystem::path& path);
void write_mvf(const std::vector<MotionVectorField>& fields, std::ostream& out);
void write_mvf(const std::vector<MotionVectorField>& fields,
               const std::filesystem::path& path);

}  // namespace movex

#endif  // MOVEX_MOTION_HPP_
