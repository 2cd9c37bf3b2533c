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

#include "movex/eval.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <string>

#include <nlohmann/json.hpp>

#include "movex/error.hpp"
#include "parse_util.hpp"

namespace movex {

int GroundTruth::num_evaluated_boxes() const {
  int n = 0;
  for (const auto& [frame, boxes] : frames)
    for (const GtBox& b : boxes)
      if (!b.ignored) ++n;
  return n;
}

GroundTruth read_mot_ground_truth(std::istream& in) {
  GroundTruth gt;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (internal::trim(line).empty()) continue;
    auto fields = internal::split(line, ',');
    if (fields.size() < 7)
      throw ParseError(line_no, "gt row needs at least 7 comma-separated fields");
    const int file_frame = internal::parse_int(fields[0], line_no, "frame");
    if (file_frame < 1)
      throw ParseError(line_no, "gt frame numbers are 1-based, got " +
                                    std::to_string(file_frame));
    GtBox box;
    box.x = internal::parse_double(fields[2], line_no, "left");
    box.y = internal::parse_double(fields[3], line_no, "top");
    box.w = internal::parse_double(fields[4], line_no, "width");
    box.h = internal::parse_double(fields[5], line_no, "height");
    box.ignored = internal::parse_int(fields[6], line_no, "flag") == 0;
    if (box.w <= 0 || box.h <= 0)
      throw ParseError(line_no, "gt box needs positive width and height");
    gt.frames[file_frame - 1].push_back(box);
    gt.num_frames = std::max(gt.num_frames, file_frame);
  }
  return gt;
}

GroundTruth read_mot_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot open gt file " + path.string());
  try {
    return read_mot_ground_truth(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

namespace {

double rect_iou(double ax, double ay, double aw, double ah, double bx, double by,
                double bw, double bh) {
  if (aw <= 0 || ah <= 0 || bw <= 0 || bh <= 0)
    throw InvalidInputError("iou requires positive box dimensions");
  const double ix = std::max(0.0, std::min(ax + aw, bx + bw) - std::max(ax, bx));
  const double iy = std::max(0.0, std::min(ay + ah, by + bh) - std::max(ay, by));
  const double inter = ix * iy;
  const double uni = aw * ah + bw * bh - inter;
  return inter / uni;
}

}  // namespace

double iou(const Detection& a, const Detection& b) {
  return rect_iou(a.x, a.y, a.w, a.h, b.x, b.y, b.w, b.h);
}

double iou(const Detection& a, const GtBox& b) {
  return rect_iou(a.x, a.y, a.w, a.h, b.x, b.y, b.w, b.h);
}

ApReport average_precision(const std::vector<DetectionSet>& predictions,
                           const GroundTruth& gt, double iou_threshold) {
  if (!(iou_threshold > 0) || iou_threshold > 1)
    throw InvalidInputError("iou threshold must lie in (0, 1]");

  struct Ranked {
    double score;
    int frame;
    int pos;  // index within the frame's set, for deterministic tie order
    const Detection* box;
  };
  std::vector<Ranked> ranked;
  for (const DetectionSet& set : predictions) {
    const bool in_range = set.frame_index >= 0 && set.frame_index < gt.num_frames;
    if (!in_range && !set.detections.empty())
      throw InvalidInputError("prediction frame " + std::to_string(set.frame_index) +
                              " outside ground-truth range [0, " +
                              std::to_string(gt.num_frames) + ")");
    for (std::size_t i = 0; i < set.detections.size(); ++i)
      ranked.push_back({set.detections[i].score, set.frame_index,
                        static_cast<int>(i), &set.detections[i]});
  }
  // Stable: equal scores keep their frame-then-position order, so the result
  // is invariant under any strictly monotone rescaling of scores.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Ranked& a, const Ranked& b) { return a.score > b.score; });

  std::map<int, std::vector<bool>> matched;
  for (const auto& [frame, boxes] : gt.frames)
    matched[frame].assign(boxes.size(), false);

  ApReport report;
  report.iou_threshold = iou_threshold;
  report.num_gt = gt.num_evaluated_boxes();

  for (const Ranked& pred : ranked) {
    int best_index = -1;
    double best_iou = 0;
    auto it = gt.frames.find(pred.frame);
    if (it != gt.frames.end()) {
      const std::vector<GtBox>& boxes = it->second;
      std::vector<bool>& taken = matched[pred.frame];
      for (std::size_t g = 0; g < boxes.size(); ++g) {
        if (taken[g]) continue;
        const double overlap = iou(*pred.box, boxes[g]);
        // Strict '>' keeps the lowest index among exact IoU ties.
        if (overlap >= iou_threshold && overlap > best_iou) {
          best_iou = overlap;
          best_index = static_cast<int>(g);
        }
      }
    }

    if (best_index >= 0) {
      matched[pred.frame][best_index] = true;
      if (it->second[static_cast<std::size_t>(best_index)].ignored)
        continue;  // absorbed by an ignore region: neither TP nor FP
      ++report.tp;
    } else {
      ++report.fp;
    }
    const double recall =
        report.num_gt > 0 ? static_cast<double>(report.tp) / report.num_gt : 0.0;
    const double precision =
        static_cast<double>(report.tp) / (report.tp + report.fp);
    report.curve.push_back({recall, precision});
  }

  // All-point interpolation: integrate the running-max precision envelope
  // over recall, scanning from the lowest-ranked prediction backwards.
  double envelope = 0;
  double ap = 0;
  for (std::size_t k = report.curve.size(); k-- > 0;) {
    envelope = std::max(envelope, report.curve[k].precision);
    const double prev_recall = k == 0 ? 0.0 : report.curve[k - 1].recall;
    ap += (report.curve[k].recall - prev_recall) * envelope;
  }
  report.ap = report.num_gt > 0 ? ap : 0.0;
  return report;
}

std::string to_json(const ApReport& report) {
  nlohmann::json doc;
  doc["ap"] = report.ap;
  doc["iou_threshold"] = report.iou_threshold;
  doc["tp"] = report.tp;
  doc["fp"] = report.fp;
  doc["num_gt"] = report.num_gt;
  auto curve = nlohmann::json::array();
  for (const PrPoint& p : report.curve)
    curve.push_back(nlohmann::json::array({p.recall, p.precision}));
  doc["curve"] = curve;
  return doc.dump(2);
}

void write_json(const ApReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInputError("cannot open " + path.string() + " for writing");
  out << to_json(report) << "\n";
  if (!out) throw InvalidInputError("short write while writing AP report");
}

std::vector<DetectionSet> hold_last_baseline(
    const std::vector<DetectionSet>& detector_outputs, int latency_frames) {
  if (latency_frames < 0) throw InvalidInputError("latency must be >= 0");
  std::vector<DetectionSet> held;
  held.reserve(detector_outputs.size());
  for (std::size_t i = 0; i < detector_outputs.size(); ++i) {
    const std::size_t src =
        i >= static_cast<std::size_t>(latency_frames) ? i - latency_frames : 0;
    DetectionSet set = detector_outputs[src];
    set.frame_index = static_cast<int>(i);
    held.push_back(std::move(set));
  }
  return held;
}

}  // namespace movex
