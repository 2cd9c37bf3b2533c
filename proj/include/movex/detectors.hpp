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

#ifndef MOVEX_DETECTORS_HPP_
#define MOVEX_DETECTORS_HPP_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <vector>

#include "movex/detection.hpp"
#include "movex/frame.hpp"

namespace movex {

// How long a detector takes to answer a request.
struct LatencyModel {
  enum class Kind {
    kFixedFrames,         // result visible L frames after submission
    kFixedWallClock,      // worker sleeps a fixed number of milliseconds
    kPerRequestSchedule,  // per-request milliseconds; last entry repeats
  };

  Kind kind = Kind::kFixedFrames;
  int frames = 0;
  double ms = 0.0;
  std::vector<double> schedule_ms;

  static LatencyModel fixed_frames(int frames);
  static LatencyModel fixed_wall_clock(double ms);
  static LatencyModel per_request_schedule(std::vector<double> schedule_ms);

  // First frame index at which a response submitted at submit_frame is
  // visible. Only meaningful for kFixedFrames.
  int available_at(int submit_frame) const { return submit_frame + frames; }

  // Sleep duration for the request with the given 0-based ordinal.
  double wall_clock_ms(int request_ordinal) const;

  void validate() const;
};

struct DetectorRequest {
  int frame_index = 0;
  Frame image;
};

struct DetectorResponse {
  int frame_index = 0;          // echoes the request tag
  DetectionSet detections;      // detections.frame_index == frame_index
  double detector_ms = 0.0;     // measured evaluation time
};

// Identity hook kept so every request flows through one preprocessing point.
Frame preprocess_image(const Frame& frame);

// A detector evaluates one preprocessed request at a time. Latency is imposed
// by the pipeline, not here.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual DetectionSet detect(const DetectorRequest& request) = 0;
};

// Replays per-frame detections ingested from a MOT det file at construction.
// Frames absent from the file yield empty sets; rows below score_threshold
// are dropped at detect time.
class FileOracle : public Detector {
 public:
  FileOracle(const std::filesystem::path& det_path, double score_threshold);
  FileOracle(std::map<int, DetectionSet> by_frame, double score_threshold);

  DetectionSet detect(const DetectorRequest& request) override;

 private:
  std::map<int, DetectionSet> by_frame_;
  double score_threshold_;
};

// Returns the k-th scripted detection set for the k-th request regardless of
// the requested frame; an exhausted script yields empty sets. The script file
// is a JSON array of frames, each an array of {"x","y","w","h","score",
// "class_id"} objects.
class ScriptedMock : public Detector {
 public:
  explicit ScriptedMock(const std::filesystem::path& script_path);
  explicit ScriptedMock(std::vector<std::vector<Detection>> responses);

  DetectionSet detect(const DetectorRequest& request) override;

 private:
  std::vector<std::vector<Detection>> responses_;
  std::size_t next_ = 0;
};

struct DetectorSpec {
  enum class Kind { kFileOracle, kScriptedMock };

  Kind kind = Kind::kFileOracle;
  std::filesystem::path path;
  double score_threshold = 0.0;
  LatencyModel latency;
};

// Builds the configured detector; unreadable or malformed files surface as
// ConfigError before any frame is processed.
std::unique_ptr<Detector> make_detector(const DetectorSpec& spec);

// MOT det format: CSV rows "frame,id,left,top,width,height,score,x,y,z" with
// 1-based frame numbers. The reader accepts rows with >= 7 fields, maps
// frames to 0-based indices and assigns class_id 1; the writer emits id -1
// and world coordinates -1 with shortest-round-trip number formatting, so a
// write/read cycle is lossless.
std::map<int, DetectionSet> read_mot_detections(std::istream& in);
std::map<int, DetectionSet> read_mot_detections(const std::filesystem::path& path);
void write_mot_detections(const std::vector<DetectionSet>& sets,
                          std::ostream& out);
void write_mot_detections(const std::vector<DetectionSet>& sets,
                          const std::filesystem::path& path);

}  // namespace movex

#endif  // MOVEX_DETECTORS_HPP_
