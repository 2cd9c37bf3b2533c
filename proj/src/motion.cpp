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

#include "movex/motion.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "movex/error.hpp"
#include "parse_util.hpp"

namespace movex {

int grid_cells(int extent, int block_size) {
  return (extent + block_size - 1) / block_size;
}

Eigen::Vector2d MotionVectorField::block_center(int row, int col) const {
  int x0 = col * block_size;
  int y0 = row * block_size;
  int bw = std::min(block_size, frame_width - x0);
  int bh = std::min(block_size, frame_height - y0);
  return {x0 + bw / 2.0, y0 + bh / 2.0};
}

void MotionVectorField::validate() const {
  if (frame_width <= 0 || frame_height <= 0)
    throw InvalidInputError("motion field has non-positive frame dimensions");
  if (block_size <= 0) throw InvalidInputError("motion field block_size must be positive");
  const int gw = grid_cells(frame_width, block_size);
  const int gh = grid_cells(frame_height, block_size);
  if (grid_width() != gw || grid_height() != gh || dy.rows() != dx.rows() ||
      dy.cols() != dx.cols())
    throw InvalidInputError(
        "motion field grid is " + std::to_string(grid_height()) + "x" +
        std::to_string(grid_width()) + ", want " + std::to_string(gh) + "x" +
        std::to_string(gw));
}

void MotionEstimatorParams::validate() const {
  if (block_size < 1) throw InvalidInputError("block_size must be >= 1");
  if (search_range < 1) throw InvalidInputError("search_range must be >= 1");
  if (zero_bias < 0) throw InvalidInputError("zero_bias must be >= 0");
}

namespace {

// Candidate ranking key: effective cost, then |dx|+|dy|, then dy, then dx.
// Total order independent of evaluation sequence.
struct Choice {
  double cost = 0;
  int taxi = 0;
  int dy = 0;
  int dx = 0;
};

bool better(const Choice& a, const Choice& b) {
  if (a.cost != b.cost) return a.cost < b.cost;
  if (a.taxi != b.taxi) return a.taxi < b.taxi;
  if (a.dy != b.dy) return a.dy < b.dy;
  return a.dx < b.dx;
}

struct BlockContext {
  const LumaPlane& prev;
  const LumaPlane& cur;
  int x0, y0, bw, bh;
  double zero_bias_sad;  // zero_bias is per pixel; SAD is summed
};

// Sum of absolute differences between the current block and the source patch
// displaced by (-dx, -dy); negative when the patch leaves the frame.
inline double candidate_cost(const BlockContext& ctx, int dx, int dy, bool* ok) {
  const int sx = ctx.x0 - dx;
  const int sy = ctx.y0 - dy;
  if (sx < 0 || sy < 0 || sx + ctx.bw > static_cast<int>(ctx.prev.cols()) ||
      sy + ctx.bh > static_cast<int>(ctx.prev.rows())) {
    *ok = false;
    return 0;
  }
  *ok = true;
  const long long sad = (ctx.cur.block(ctx.y0, ctx.x0, ctx.bh, ctx.bw).cast<int>() -
                         ctx.prev.block(sy, sx, ctx.bh, ctx.bw).cast<int>())
                            .abs()
                            .sum();
  double cost = static_cast<double>(sad);
  if (dx == 0 && dy == 0) cost -= ctx.zero_bias_sad;
  return cost;
}

inline Choice make_choice(double cost, int dx, int dy) {
  return {cost, std::abs(dx) + std::abs(dy), dy, dx};
}

MotionVector search_full(const BlockContext& ctx, int range) {
  bool have = false;
  Choice best;
  for (int dy = -range; dy <= range; ++dy) {
    for (int dx = -range; dx <= range; ++dx) {
      bool ok = false;
      double cost = candidate_cost(ctx, dx, dy, &ok);
      if (!ok) continue;
      Choice c = make_choice(cost, dx, dy);
      if (!have || better(c, best)) {
        best = c;
        have = true;
      }
    }
  }
  return {best.dx, best.dy};
}

MotionVector search_three_step(const BlockContext& ctx, int range) {
  bool ok = false;
  Choice best = make_choice(candidate_cost(ctx, 0, 0, &ok), 0, 0);
  for (int step = (range + 1) / 2;; step = (step + 1) / 2) {
    Choice round_best = best;
    for (int oy = -1; oy <= 1; ++oy) {
      for (int ox = -1; ox <= 1; ++ox) {
        if (ox == 0 && oy == 0) continue;
        const int dx = best.dx + ox * step;
        const int dy = best.dy + oy * step;
        if (std::abs(dx) > range || std::abs(dy) > range) continue;
        double cost = candidate_cost(ctx, dx, dy, &ok);
        if (!ok) continue;
        Choice c = make_choice(cost, dx, dy);
        if (better(c, round_best)) round_best = c;
      }
    }
    best = round_best;
    if (step == 1) break;
  }
  return {best.dx, best.dy};
}

}  // namespace

MotionVectorField estimate_motion(const Frame& prev, const Frame& cur,
                                  const MotionEstimatorParams& params) {
  params.validate();
  if (prev.width() <= 0 || prev.height() <= 0)
    throw InvalidInputError("cannot estimate motion on empty frames");
  if (prev.width() != cur.width() || prev.height() != cur.height())
    throw InvalidInputError("frame size mismatch: " + std::to_string(prev.width()) +
                            "x" + std::to_string(prev.height()) + " vs " +
                            std::to_string(cur.width()) + "x" +
                            std::to_string(cur.height()));
  if (cur.index != prev.index + 1)
    throw InvalidInputError("frames are not consecutive: " +
                            std::to_string(prev.index) + " then " +
                            std::to_string(cur.index));

  MotionVectorField field;
  field.src_index = prev.index;
  field.frame_width = prev.width();
  field.frame_height = prev.height();
  field.block_size = params.block_size;
  const int gw = grid_cells(field.frame_width, params.block_size);
  const int gh = grid_cells(field.frame_height, params.block_size);
  field.dx.resize(gh, gw);
  field.dy.resize(gh, gw);

  for (int row = 0; row < gh; ++row) {
    for (int col = 0; col < gw; ++col) {
      const int x0 = col * params.block_size;
      const int y0 = row * params.block_size;
      const int bw = std::min(params.block_size, field.frame_width - x0);
      const int bh = std::min(params.block_size, field.frame_height - y0);
      BlockContext ctx{prev.luma, cur.luma,          x0, y0, bw, bh,
                       params.zero_bias * bw * bh};
      MotionVector mv = params.method == SearchMethod::kFullSearch
                            ? search_full(ctx, params.search_range)
                            : search_three_step(ctx, params.search_range);
      field.dx(row, col) = mv.dx;
      field.dy(row, col) = mv.dy;
    }
  }
  return field;
}

namespace {

// Splits on runs of blanks; '\r' is treated as a blank so CRLF input parses.
std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
      ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r')
      ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

struct LineReader {
  std::istream& in;
  int line_no = 0;
  std::string line;

  bool next() {
    if (!std::getline(in, line)) return false;
    ++line_no;
    return true;
  }
};

}  // namespace

std::vector<MotionVectorField> read_mvf(std::istream& in) {
  LineReader reader{in, 0, {}};
  if (!reader.next()) throw ParseError(1, "empty MVF stream");
  auto header = split_ws(reader.line);
  if (header.size() != 6 || header[0] != "MVF")
    throw ParseError(reader.line_no,
                     "bad MVF header (want 'MVF 1 <w> <h> <block> <fields>')");
  if (header[1] != "1")
    throw ParseError(reader.line_no,
                     "unsupported MVF version '" + std::string(header[1]) + "'");
  const int frame_w = internal::parse_int(header[2], reader.line_no, "frame width");
  const int frame_h = internal::parse_int(header[3], reader.line_no, "frame height");
  const int block = internal::parse_int(header[4], reader.line_no, "block size");
  const int num_fields = internal::parse_int(header[5], reader.line_no, "field count");
  if (frame_w < 1 || frame_h < 1 || block < 1)
    throw ParseError(reader.line_no, "non-positive MVF geometry");
  if (num_fields < 0) throw ParseError(reader.line_no, "negative MVF field count");

  const int gw = grid_cells(frame_w, block);
  const int gh = grid_cells(frame_h, block);

  std::vector<MotionVectorField> fields;
  fields.reserve(static_cast<std::size_t>(num_fields));
  for (int f = 0; f < num_fields; ++f) {
    if (!reader.next())
      throw ParseError(reader.line_no + 1, "unexpected end of MVF: expected FIELD " +
                                               std::to_string(f + 1) + " of " +
                                               std::to_string(num_fields));
    auto tok = split_ws(reader.line);
    if (tok.size() != 2 || tok[0] != "FIELD")
      throw ParseError(reader.line_no, "expected 'FIELD <src_index>'");
    MotionVectorField field;
    field.src_index = internal::parse_int(tok[1], reader.line_no, "src index");
    field.frame_width = frame_w;
    field.frame_height = frame_h;
    field.block_size = block;
    if (!fields.empty() && field.src_index <= fields.back().src_index)
      throw ParseError(reader.line_no, "field src indices must be strictly increasing");
    field.dx.resize(gh, gw);
    field.dy.resize(gh, gw);
    for (int row = 0; row < gh; ++row) {
      for (int col = 0; col < gw; ++col) {
        if (!reader.next())
          throw ParseError(reader.line_no + 1,
                           "unexpected end of MVF inside field " +
                               std::to_string(field.src_index));
        auto mv = split_ws(reader.line);
        if (mv.size() != 2)
          throw ParseError(reader.line_no, "expected '<dx> <dy>' vector line");
        field.dx(row, col) = internal::parse_int(mv[0], reader.line_no, "dx");
        field.dy(row, col) = internal::parse_int(mv[1], reader.line_no, "dy");
      }
    }
    fields.push_back(std::move(field));
  }
  while (reader.next()) {
    if (!split_ws(reader.line).empty())
      throw ParseError(reader.line_no, "trailing content after last MVF field");
  }
  return fields;
}

std::vector<MotionVectorField> read_mvf(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot open MVF file " + path.string());
  try {
    return read_mvf(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_mvf(const std::vector<MotionVectorField>& fields, std::ostream& out) {
  if (fields.empty()) throw InvalidInputError("cannot write MVF with no fields");
  const auto& first = fields.front();
  for (std::size_t i = 0; i < fields.size(); ++i) {
    fields[i].validate();
    if (fields[i].frame_width != first.frame_width ||
        fields[i].frame_height != first.frame_height ||
        fields[i].block_size != first.block_size)
      throw InvalidInputError("MVF fields disagree in geometry");
    if (i > 0 && fields[i].src_index <= fields[i - 1].src_index)
      throw InvalidInputError("MVF field src indices must be strictly increasing");
  }

  std::ostringstream buf;
  buf << "MVF 1 " << first.frame_width << " " << first.frame_height << " "
      << first.block_size << " " << fields.size() << "\n";
  for (const auto& field : fields) {
    buf << "FIELD " << field.src_index << "\n";
    for (int row = 0; row < field.grid_height(); ++row)
      for (int col = 0; col < field.grid_width(); ++col)
        buf << field.dx(row, col) << " " << field.dy(row, col) << "\n";
  }
  out << buf.str();
  if (!out) throw InvalidInputError("short write while writing MVF");
}

void write_mvf(const std::vector<MotionVectorField>& fields,
               const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInputError("cannot open " + path.string() + " for writing");
  write_mvf(fields, out);
}

}  // namespace movex
