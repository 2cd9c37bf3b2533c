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

#ifndef MOVEX_EVAL_HPP_
#define MOVEX_EVAL_HPP_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "movex/detection.hpp"

namespace movex {

struct GtBox {
  double x = 0;
  double y = 0;
  double w = 0;
  double h = 0;
  // Ignore-flagged boxes (MOT flag 0) neither add to num_gt nor penalize
  // predictions matched to them.
  bool ignored = false;
};

struct GroundTruth {
  int num_frames = 0;               // frame indices span [0, num_frames)
  std::map<int, std::vector<GtBox>> frames;

  int num_evaluated_boxes() const;  // non-ignored boxes across all frames
};

// MOT gt format: "frame,id,left,top,width,height,flag,class,visibility";
// flag 0 marks an ignore region. Frames are 1-based in the file.
GroundTruth read_mot_ground_truth(std::istream& in);
GroundTruth read_mot_ground_truth(const std::filesystem::path& path);

// Intersection-over-union of two boxes; 0 when disjoint, 1 for identical
// boxes. Throws InvalidInputError on non-positive dimensions.
double iou(const Detection& a, const Detection& b);
double iou(const Detection& a, const GtBox& b);

struct PrPoint {
  double recall = 0;
  double precision = 0;
};

struct ApReport {
  double ap = 0;
  double iou_threshold = 0.5;
  int tp = 0;
  int fp = 0;
  int num_gt = 0;
  std::vector<PrPoint> curve;  // one point per counted prediction, in rank order
};

// Average precision at one IoU threshold. Predictions are ranked by strictly
// descending score (ties keep frame order, then in-frame order); each is
// greedily matched to the unmatched ground-truth box of its frame with the
// highest IoU >= threshold, ties to the lower box index. Matches to ignored
// boxes count neither way. AP integrates the all-point interpolated
// precision envelope over recall; no predictions or no ground truth gives 0.
ApReport average_precision(const std::vector<DetectionSet>& predictions,
                           const GroundTruth& gt, double iou_threshold);

std::string to_json(const ApReport& report);
void write_json(const ApReport& report, const std::filesystem::path& path);

// Latency-only baseline: frame i carries the raw detector output for frame
// max(0, i - latency_frames), unmodified. latency 0 reproduces the detector
// outputs exactly.
std::vector<DetectionSet> hold_last_baseline(
    const std::vector<DetectionSet>& detector_outputs, int latency_frames);

}  // namespace movex

#endif  // MOVEX_EVAL_HPP_
