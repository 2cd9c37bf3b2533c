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

#include "movex/detectors.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "movex/error.hpp"
#include "parse_util.hpp"

namespace movex {

LatencyModel LatencyModel::fixed_frames(int frames) {
  LatencyModel m;
  m.kind = Kind::kFixedFrames;
  m.frames = frames;
  return m;
}

LatencyModel LatencyModel::fixed_wall_clock(double ms) {
  LatencyModel m;
  m.kind = Kind::kFixedWallClock;
  m.ms = ms;
  return m;
}

LatencyModel LatencyModel::per_request_schedule(std::vector<double> schedule_ms) {
  LatencyModel m;
  m.kind = Kind::kPerRequestSchedule;
  m.schedule_ms = std::move(schedule_ms);
  return m;
}

double LatencyModel::wall_clock_ms(int request_ordinal) const {
  switch (kind) {
    case Kind::kFixedWallClock:
      return ms;
    case Kind::kPerRequestSchedule: {
      const std::size_t i = std::min(static_cast<std::size_t>(request_ordinal),
                                     schedule_ms.size() - 1);
      return schedule_ms[i];
    }
    case Kind::kFixedFrames:
      return 0.0;
  }
  return 0.0;
}

void LatencyModel::validate() const {
  switch (kind) {
    case Kind::kFixedFrames:
      if (frames < 0) throw ConfigError("frame latency must be >= 0");
      break;
    case Kind::kFixedWallClock:
      if (ms < 0) throw ConfigError("wall-clock latency must be >= 0");
      break;
    case Kind::kPerRequestSchedule:
      if (schedule_ms.empty()) throw ConfigError("latency schedule is empty");
      for (double v : schedule_ms)
        if (v < 0) throw ConfigError("latency schedule entries must be >= 0");
      break;
  }
}

Frame preprocess_image(const Frame& frame) { return frame; }

FileOracle::FileOracle(const std::filesystem::path& det_path, double score_threshold)
    : score_threshold_(score_threshold) {
  try {
    by_frame_ = read_mot_detections(det_path);
  } catch (const Error& e) {
    throw ConfigError("detector file " + det_path.string() + ": " + e.what());
  }
}

FileOracle::FileOracle(std::map<int, DetectionSet> by_frame, double score_threshold)
    : by_frame_(std::move(by_frame)), score_threshold_(score_threshold) {}

DetectionSet FileOracle::detect(const DetectorRequest& request) {
  DetectionSet out;
  out.frame_index = request.frame_index;
  auto it = by_frame_.find(request.frame_index);
  if (it == by_frame_.end()) return out;
  for (const Detection& d : it->second.detections)
    if (d.score >= score_threshold_) out.detections.push_back(d);
  return out;
}

namespace {

std::vector<std::vector<Detection>> parse_mock_script(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open mock script " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("mock script " + path.string() + ": " + e.what());
  }
  if (!doc.is_array())
    throw ConfigError("mock script " + path.string() + ": top level must be an array");

  std::vector<std::vector<Detection>> responses;
  responses.reserve(doc.size());
  for (const auto& frame : doc) {
    if (!frame.is_array())
      throw ConfigError("mock script " + path.string() +
                        ": each response must be an array of boxes");
    std::vector<Detection> boxes;
    boxes.reserve(frame.size());
    for (const auto& box : frame) {
      if (!box.is_object() || !box.contains("x") || !box.contains("y") ||
          !box.contains("w") || !box.contains("h"))
        throw ConfigError("mock script " + path.string() +
                          ": boxes need numeric x, y, w, h");
      Detection d;
      try {
        d.x = box.at("x").get<double>();
        d.y = box.at("y").get<double>();
        d.w = box.at("w").get<double>();
        d.h = box.at("h").get<double>();
        d.score = box.value("score", 1.0);
        d.class_id = box.value("class_id", 1);
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError("mock script " + path.string() + ": " + e.what());
      }
      if (d.w <= 0 || d.h <= 0)
        throw ConfigError("mock script " + path.string() +
                          ": boxes need positive w and h");
      boxes.push_back(d);
    }
    responses.push_back(std::move(boxes));
  }
  return responses;
}

}  // namespace

ScriptedMock::ScriptedMock(const std::filesystem::path& script_path)
    : responses_(parse_mock_script(script_path)) {}

ScriptedMock::ScriptedMock(std::vector<std::vector<Detection>> responses)
    : responses_(std::move(responses)) {}

DetectionSet ScriptedMock::detect(const DetectorRequest& request) {
  DetectionSet out;
  out.frame_index = request.frame_index;
  if (next_ < responses_.size()) out.detections = responses_[next_];
  ++next_;
  return out;
}

std::unique_ptr<Detector> make_detector(const DetectorSpec& spec) {
  spec.latency.validate();
  switch (spec.kind) {
    case DetectorSpec::Kind::kFileOracle:
      return std::make_unique<FileOracle>(spec.path, spec.score_threshold);
    case DetectorSpec::Kind::kScriptedMock:
      return std::make_unique<ScriptedMock>(spec.path);
  }
  throw ConfigError("unknown detector kind");
}

std::map<int, DetectionSet> read_mot_detections(std::istream& in) {
  std::map<int, DetectionSet> by_frame;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (internal::trim(line).empty()) continue;
    auto fields = internal::split(line, ',');
    if (fields.size() < 7)
      throw ParseError(line_no, "det row needs at least 7 comma-separated fields");
    const int file_frame = internal::parse_int(fields[0], line_no, "frame");
    if (file_frame < 1)
      throw ParseError(line_no, "det frame numbers are 1-based, got " +
                                    std::to_string(file_frame));
    Detection d;
    d.x = internal::parse_double(fields[2], line_no, "left");
    d.y = internal::parse_double(fields[3], line_no, "top");
    d.w = internal::parse_double(fields[4], line_no, "width");
    d.h = internal::parse_double(fields[5], line_no, "height");
    d.score = internal::parse_double(fields[6], line_no, "score");
    d.class_id = 1;
    if (d.w <= 0 || d.h <= 0)
      throw ParseError(line_no, "det box needs positive width and height");
    const int frame = file_frame - 1;
    DetectionSet& set = by_frame[frame];
    set.frame_index = frame;
    set.detections.push_back(d);
  }
  return by_frame;
}

std::map<int, DetectionSet> read_mot_detections(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot open det file " + path.string());
  try {
    return read_mot_detections(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_mot_detections(const std::vector<DetectionSet>& sets, std::ostream& out) {
  std::ostringstream buf;
  for (const DetectionSet& set : sets) {
    for (const Detection& d : set.detections) {
      buf << (set.frame_index + 1) << ",-1," << internal::format_double(d.x) << ","
          << internal::format_double(d.y) << "," << internal::format_double(d.w)
          << "," << internal::format_double(d.h) << ","
          << internal::format_double(d.score) << ",-1,-1,-1\n";
    }
  }
  out << buf.str();
  if (!out) throw InvalidInputError("short write while writing det file");
}

void write_mot_detections(const std::vector<DetectionSet>& sets,
                          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInputError("cannot open " + path.string() + " for writing");
  write_mot_detections(sets, out);
}

}  // namespace movex
