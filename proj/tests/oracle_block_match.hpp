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

#ifndef MOVEX_TESTS_ORACLE_BLOCK_MATCH_HPP_
#define MOVEX_TESTS_ORACLE_BLOCK_MATCH_HPP_

// Independent exhaustive minimum-MAD reference, written against the
// documented contract only: plain scalar loops, no Eigen, no shared code
// with the estimator under test.

#include <cstdlib>

#include "movex/frame.hpp"
#include "movex/motion.hpp"

namespace movex_test {

struct OracleResult {
  int dx = 0;
  int dy = 0;
  double mad = 0;  // mean absolute difference at the winner, bias included
};

// Best displacement for the single block whose top-left pixel is (x0, y0)
// and extent is bw x bh in `cur`, scanning every candidate in the window.
inline OracleResult oracle_block(const movex::Frame& prev, const movex::Frame& cur,
                                 int x0, int y0, int bw, int bh, int range,
                                 double zero_bias) {
  const int W = prev.width();
  const int H = prev.height();
  bool have = false;
  OracleResult best;
  int best_taxi = 0;

  for (int dy = -range; dy <= range; ++dy) {
    for (int dx = -range; dx <= range; ++dx) {
      const int sx = x0 - dx;
      const int sy = y0 - dy;
      if (sx < 0 || sy < 0 || sx + bw > W || sy + bh > H) continue;
      long long sad = 0;
      for (int y = 0; y < bh; ++y)
        for (int x = 0; x < bw; ++x)
          sad += std::abs(static_cast<int>(cur.luma(y0 + y, x0 + x)) -
                          static_cast<int>(prev.luma(sy + y, sx + x)));
      double mad = static_cast<double>(sad) / (bw * bh);
      if (dx == 0 && dy == 0) mad -= zero_bias;
      const int taxi = std::abs(dx) + std::abs(dy);

      bool wins = false;
      if (!have) {
        wins = true;
      } else if (mad != best.mad) {
        wins = mad < best.mad;
      } else if (taxi != best_taxi) {
        wins = taxi < best_taxi;
      } else if (dy != best.dy) {
        wins = dy < best.dy;
      } else {
        wins = dx < best.dx;
      }
      if (wins) {
        best = {dx, dy, mad};
        best_taxi = taxi;
        have = true;
      }
    }
  }
  return best;
}

// Whole-field oracle with the same block tiling rule as the estimator.
inline movex::MotionVectorField oracle_field(const movex::Frame& prev,
                                             const movex::Frame& cur, int block_size,
                                             int range, double zero_bias = 0.0) {
  movex::MotionVectorField field;
  field.src_index = prev.index;
  field.frame_width = prev.width();
  field.frame_height = prev.height();
  field.block_size = block_size;
  const int gw = (prev.width() + block_size - 1) / block_size;
  const int gh = (prev.height() + block_size - 1) / block_size;
  field.dx.resize(gh, gw);
  field.dy.resize(gh, gw);
  for (int r = 0; r < gh; ++r) {
    for (int c = 0; c < gw; ++c) {
      const int x0 = c * block_size;
      const int y0 = r * block_size;
      const int bw = x0 + block_size <= prev.width() ? block_size : prev.width() - x0;
      const int bh =
          y0 + block_size <= prev.height() ? block_size : prev.height() - y0;
      OracleResult res = oracle_block(prev, cur, x0, y0, bw, bh, range, zero_bias);
      field.dx(r, c) = res.dx;
      field.dy(r, c) = res.dy;
    }
  }
  return field;
}

}  // namespace movex_test

#endif  // MOVEX_TESTS_ORACLE_BLOCK_MATCH_HPP_
