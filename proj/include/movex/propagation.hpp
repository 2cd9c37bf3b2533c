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

#ifndef MOVEX_PROPAGATION_HPP_
#define MOVEX_PROPAGATION_HPP_

#include <Eigen/Core>
#include <cstddef>
#include <deque>
#include <limits>
#include <vector>

#include "movex/detection.hpp"
#include "movex/motion.hpp"

namespace movex {

enum class AggregationKind {
  kMedianXY,  // per-component median of the enclosed vectors (default)
  kMeanXY,    // per-component arithmetic mean
};

// Motion vectors of the blocks whose centers fall inside [x, x+w) x [y, y+h).
// If no block center is enclosed, falls back to every block overlapping the
// box; if nothing overlaps either, returns empty.
std::vector<MotionVector> enclosed_vectors(const Detection& box,
                                           const MotionVectorField& field);

// Aggregates the enclosed vectors into one displacement. The median of an
// even count is the mean of the two middle values per component; an empty
// vector set aggregates to (0, 0). A single outlier among >= 3 vectors cannot
// move the median output.
Eigen::Vector2d aggregate(const Detection& box, const MotionVectorField& field,
                          AggregationKind kind);

// Translates every box of `dets` by its aggregated displacement, producing
// the set for field.src_index + 1. Boxes whose translated extent no longer
// intersects the frame are dropped; the rest are clamped back into the frame
// by position only, so w and h are never altered. Requires dets.frame_index
// == field.src_index.
DetectionSet propagate(const DetectionSet& dets, const MotionVectorField& field,
                       AggregationKind kind = AggregationKind::kMedianXY);

// FIFO of motion fields with consecutive src indices, used to bridge the gap
// between a stale detector result and the current frame.
class FlowBuffer {
 public:
  static constexpr std::size_t kUnbounded =
      std::numeric_limits<std::size_t>::max();

  explicit FlowBuffer(std::size_t capacity = 1024);

  // Appends a field. Throws InvalidInputError unless its src_index continues
  // the stored run (and its geometry matches); throws BufferOverflowError
  // when the buffer is already at capacity.
  void push(MotionVectorField field);

  void clear();
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  const std::deque<MotionVectorField>& entries() const { return entries_; }

 private:
  std::size_t capacity_;
  std::deque<MotionVectorField> entries_;
};

// Left-fold of propagate over the buffered fields, skipping entries with
// src_index < from_index. Requires prior.frame_index == from_index and, when
// any entry applies, that the first applied entry has src_index ==
// from_index. With no applicable entries the prior is returned unchanged.
DetectionSet replay(const DetectionSet& prior, const FlowBuffer& buffer,
                    int from_index,
                    AggregationKind kind = AggregationKind::kMedianXY);

}  // namespace movex

#endif  // MOVEX_PROPAGATION_HPP_
