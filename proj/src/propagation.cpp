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

#include "movex/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "movex/error.hpp"

namespace movex {
namespace {

void check_box(const Detection& box) {
  if (!(box.w > 0) || !(box.h > 0))
    throw InvalidInputError("detection has non-positive size " +
                            std::to_string(box.w) + "x" + std::to_string(box.h));
}

// Median of a small unsorted vector; even counts average the two middles.
double median_of(std::vector<int>& values) {
  const std::size_t n = values.size();
  std::sort(values.begin(), values.end());
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

}  // namespace

std::vector<MotionVector> enclosed_vectors(const Detection& box,
                                           const MotionVectorField& field) {
  check_box(box);
  field.validate();
  const int B = field.block_size;
  const int gh = field.grid_height();
  const int gw = field.grid_width();

  // Candidate window: one spare cell around the box extent, filtered exactly.
  const int r0 = std::clamp(static_cast<int>(std::floor(box.y / B)) - 1, 0, gh - 1);
  const int r1 = std::clamp(static_cast<int>(std::floor((box.y + box.h) / B)) + 1, 0, gh - 1);
  const int c0 = std::clamp(static_cast<int>(std::floor(box.x / B)) - 1, 0, gw - 1);
  const int c1 = std::clamp(static_cast<int>(std::floor((box.x + box.w) / B)) + 1, 0, gw - 1);

  std::vector<MotionVector> enclosed;
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      const Eigen::Vector2d center = field.block_center(r, c);
      if (center.x() >= box.x && center.x() < box.x + box.w && center.y() >= box.y &&
          center.y() < box.y + box.h)
        enclosed.push_back(field.at(r, c));
    }
  }
  if (!enclosed.empty()) return enclosed;

  // Fallback: no center enclosed (box smaller than a block, or straddling
  // cell boundaries); use every overlapping block instead.
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      const int bx = c * B;
      const int by = r * B;
      const int bw = std::min(B, field.frame_width - bx);
      const int bh = std::min(B, field.frame_height - by);
      if (bx < box.x + box.w && bx + bw > box.x && by < box.y + box.h &&
          by + bh > box.y)
        enclosed.push_back(field.at(r, c));
    }
  }
  return enclosed;
}

Eigen::Vector2d aggregate(const Detection& box, const MotionVectorField& field,
                          AggregationKind kind) {
  const std::vector<MotionVector> vectors = enclosed_vectors(box, field);
  if (vectors.empty()) return {0.0, 0.0};

  if (kind == AggregationKind::kMeanXY) {
    Eigen::Vector2d sum{0.0, 0.0};
    for (const MotionVector& v : vectors) sum += Eigen::Vector2d(v.dx, v.dy);
    return sum / static_cast<double>(vectors.size());
  }

  std::vector<int> xs(vectors.size()), ys(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    xs[i] = vectors[i].dx;
    ys[i] = vectors[i].dy;
  }
  return {median_of(xs), median_of(ys)};
}

DetectionSet propagate(const DetectionSet& dets, const MotionVectorField& field,
                       AggregationKind kind) {
  field.validate();
  if (dets.frame_index != field.src_index)
    throw InvalidInputError("cannot propagate detections of frame " +
                            std::to_string(dets.frame_index) + " with field for frame " +
                            std::to_string(field.src_index));

  DetectionSet out;
  out.frame_index = field.dst_index();
  out.detections.reserve(dets.detections.size());
  const double W = field.frame_width;
  const double H = field.frame_height;
  for (const Detection& box : dets.detections) {
    const Eigen::Vector2d disp = aggregate(box, field, kind);
    Detection moved = box;
    moved.x += disp.x();
    moved.y += disp.y();
    // Drop boxes that left the frame entirely; clamp the rest back in by
    // position so width and height survive unchanged.
    if (!(moved.x < W && moved.x + moved.w > 0 && moved.y < H && moved.y + moved.h > 0))
      continue;
    moved.x = std::clamp(moved.x, 0.0, std::max(0.0, W - moved.w));
    moved.y = std::clamp(moved.y, 0.0, std::max(0.0, H - moved.h));
    out.detections.push_back(moved);
  }
  return out;
}

FlowBuffer::FlowBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw InvalidInputError("flow buffer capacity must be positive");
}

void FlowBuffer::push(MotionVectorField field) {
  field.validate();
  if (!entries_.empty()) {
    const MotionVectorField& back = entries_.back();
    if (field.src_index != back.src_index + 1)
      throw InvalidInputError("flow buffer expects src " +
                              std::to_string(back.src_index + 1) + ", got " +
                              std::to_string(field.src_index));
    if (field.frame_width != back.frame_width ||
        field.frame_height != back.frame_height ||
        field.block_size != back.block_size)
      throw InvalidInputError("flow buffer field geometry changed mid-stream");
  }
  if (entries_.size() >= capacity_)
    throw BufferOverflowError("flow buffer capacity " + std::to_string(capacity_) +
                              " exceeded");
  entries_.push_back(std::move(field));
}

void FlowBuffer::clear() { entries_.clear(); }

DetectionSet replay(const DetectionSet& prior, const FlowBuffer& buffer,
                    int from_index, AggregationKind kind) {
  if (prior.frame_index != from_index)
    throw InvalidInputError("replay prior is tagged frame " +
                            std::to_string(prior.frame_index) + ", expected " +
                            std::to_string(from_index));
  DetectionSet current = prior;
  for (const MotionVectorField& field : buffer.entries()) {
    if (field.src_index < from_index) continue;
    if (field.src_index != current.frame_index)
      throw InvalidInputError("replay gap: prior at frame " +
                              std::to_string(current.frame_index) +
                              " but next buffered field is for frame " +
                              std::to_string(field.src_index));
    current = propagate(current, field, kind);
  }
  return current;
}

}  // namespace movex
