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

#ifndef MOVEX_DETECTION_HPP_
#define MOVEX_DETECTION_HPP_

#include <vector>

namespace movex {

// Axis-aligned box in pixel coordinates, top-left origin.
struct Detection {
  double x = 0;
  double y = 0;
  double w = 0;
  double h = 0;
  double score = 1.0;
  int class_id = 1;

  bool operator==(const Detection&) const = default;
};

// All detections attributed to one frame.
struct DetectionSet {
  int frame_index = 0;
  std::vector<Detection> detections;

  bool operator==(const DetectionSet&) const = default;
};

}  // namespace movex

#endif  // MOVEX_DETECTION_HPP_
