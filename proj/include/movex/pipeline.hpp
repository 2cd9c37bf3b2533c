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

#ifndef MOVEX_PIPELINE_HPP_
#define MOVEX_PIPELINE_HPP_

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "movex/detectors.hpp"
#include "movex/motion.hpp"
#include "movex/propagation.hpp"

namespace movex {

// Where per-frame motion fields come from.
struct FlowFromEstimator {
  MotionEstimatorParams params;
};
struct FlowFromSidecar {
  std::filesystem::path path;  // MVF file covering every consumed src index
};
struct FlowFromFields {
  std::vector<MotionVectorField> fields;
};
using FlowSource = std::variant<FlowFromEstimator, FlowFromSidecar, FlowFromFields>;

enum class PipelineMode {
  kDeterministic,  // single-threaded, frame-counted latency only
  kRealTime,       // detector runs on a worker thread
};

struct PipelineConfig {
  AggregationKind aggregation = AggregationKind::kMedianXY;
  FlowSource flow = FlowFromEstimator{};
  DetectorSpec detector;
  // When set, used instead of building a detector from `detector`;
  // detector.latency still applies.
  std::shared_ptr<Detector> detector_instance;
  std::size_t buffer_capacity = 1024;
  PipelineMode mode = PipelineMode::kDeterministic;
};

struct FrameResult {
  int frame_index = 0;
  DetectionSet detections;
  double step_latency_s = 0.0;  // pipeline work only; detector wait excluded
  int prior_age = 0;            // frames since the prior was last refreshed
};

// One in-flight detector request, identified by the frame it was built from.
struct InflightRequest {
  int frame_index = 0;
};

// State of the propagation worker between frames. `i` is the last completed
// frame, `m` the frame whose detector result the prior descends from.
struct PipelineState {
  int i = 0;
  int m = 0;
  DetectionSet prior;
  FlowBuffer buffer;
  std::optional<InflightRequest> inflight;

  explicit PipelineState(std::size_t buffer_capacity = 1024)
      : buffer(buffer_capacity) {}
};

struct StepOutcome {
  DetectionSet emitted;
  int prior_age = 0;
  // True when a detector result was consumed this step; the state then holds
  // a resubmission marker for the new current frame and the caller must issue
  // that request.
  bool applied_result = false;
};

// Advances the state machine by one frame. `field` must have src_index ==
// state.i. The field is buffered first (overflow surfaces here), then a
// result, if present, is replayed through the buffer and becomes the new
// prior with the buffer cleared; otherwise the prior advances one step.
// Pure transition: identical inputs yield identical outcomes.
StepOutcome step(PipelineState& state, const MotionVectorField& field,
                 const std::optional<DetectorResponse>& result,
                 AggregationKind kind);

// Runs the full pipeline over a frame sequence: blocking detection on frame
// 0, then one step per frame with a single detector request in flight,
// polled non-blockingly once per frame. Deterministic mode requires a
// kFixedFrames latency model (ConfigError otherwise) and emits bit-identical
// results for identical inputs; real-time mode emits the same detections for
// frame-counted latencies.
std::vector<FrameResult> run_pipeline(const std::vector<Frame>& frames,
                                      const PipelineConfig& config);

// run_pipeline plus detector-side measurements, for reporting.
struct RunTrace {
  std::vector<FrameResult> results;
  std::vector<double> detector_ms;  // one entry per response the pipeline consumed
  int requests_submitted = 0;
  int results_applied = 0;
};
RunTrace run_pipeline_traced(const std::vector<Frame>& frames,
                             const PipelineConfig& config);

struct LatencySummary {
  double mean_s = 0;
  double median_s = 0;  // nearest-rank order statistic
  double p95_s = 0;     // nearest-rank order statistic
  double max_s = 0;
  double prior_age_mean = 0;
  int prior_age_max = 0;
};

// Summary statistics over a run's step latencies and prior ages. Median and
// p95 are nearest-rank order statistics, so each is a value that actually
// occurred. Throws InvalidInputError on an empty input.
LatencySummary measure_latency(const std::vector<FrameResult>& results);

}  // namespace movex

#endif  // MOVEX_PIPELINE_HPP_
