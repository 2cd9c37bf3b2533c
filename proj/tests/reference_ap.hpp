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

#ifndef MOVEX_TESTS_REFERENCE_AP_HPP_
#define MOVEX_TESTS_REFERENCE_AP_HPP_

// Independent average-precision reference built from the definition alone:
// rank by score, greedy per-frame matching, all-point interpolation via an
// O(n^2) max scan. Kept deliberately naive.

#include <algorithm>
#include <map>
#include <vector>

#include "movex/detection.hpp"
#include "movex/eval.hpp"

namespace movex_test {

inline double ref_iou(double ax, double ay, double aw, double ah, double bx,
                      double by, double bw, double bh) {
  const double x1 = std::max(ax, bx);
  const double y1 = std::max(ay, by);
  const double x2 = std::min(ax + aw, bx + bw);
  const double y2 = std::min(ay + ah, by + bh);
  if (x2 <= x1 || y2 <= y1) return 0.0;
  const double inter = (x2 - x1) * (y2 - y1);
  return inter / (aw * ah + bw * bh - inter);
}

inline double reference_ap(const std::vector<movex::DetectionSet>& preds,
                           const movex::GroundTruth& gt, double thr) {
  struct Entry {
    double score;
    int frame;
    int order;  // global ingestion order, breaks score ties stably
    movex::Detection box;
  };
  std::vector<Entry> entries;
  int order = 0;
  for (const auto& set : preds)
    for (const auto& d : set.detections)
      entries.push_back({d.score, set.frame_index, order++, d});
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.order < b.order;
  });

  int num_gt = 0;
  for (const auto& [frame, boxes] : gt.frames)
    for (const auto& b : boxes)
      if (!b.ignored) ++num_gt;

  std::map<int, std::vector<bool>> used;
  std::vector<double> recalls, precisions;
  int tp = 0, fp = 0;
  for (const Entry& e : entries) {
    int best = -1;
    double best_overlap = 0;
    auto it = gt.frames.find(e.frame);
    if (it != gt.frames.end()) {
      auto& taken = used[e.frame];
      if (taken.empty()) taken.assign(it->second.size(), false);
      for (int g = 0; g < static_cast<int>(it->second.size()); ++g) {
        if (taken[static_cast<std::size_t>(g)]) continue;
        const auto& box = it->second[static_cast<std::size_t>(g)];
        const double ov =
            ref_iou(e.box.x, e.box.y, e.box.w, e.box.h, box.x, box.y, box.w, box.h);
        if (ov >= thr && ov > best_overlap) {
          best_overlap = ov;
          best = g;
        }
      }
    }
    if (best >= 0) {
      used[e.frame][static_cast<std::size_t>(best)] = true;
      if (it->second[static_cast<std::size_t>(best)].ignored) continue;
      ++tp;
    } else {
      ++fp;
    }
    recalls.push_back(num_gt > 0 ? static_cast<double>(tp) / num_gt : 0.0);
    precisions.push_back(static_cast<double>(tp) / (tp + fp));
  }

  if (num_gt == 0 || recalls.empty()) return 0.0;
  double ap = 0;
  for (std::size_t k = 0; k < recalls.size(); ++k) {
    const double r0 = k == 0 ? 0.0 : recalls[k - 1];
    const double dr = recalls[k] - r0;
    if (dr == 0) continue;
    double env = 0;
    for (std::size_t j = k; j < precisions.size(); ++j)
      env = std::max(env, precisions[j]);
    ap += dr * env;
  }
  return ap;
}

}  // namespace movex_test

#endif  // MOVEX_TESTS_REFERENCE_AP_HPP_
