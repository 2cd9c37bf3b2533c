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

#include "movex/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <map>
#include <mutex>
#include <thread>

#include "movex/error.hpp"

namespace movex {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// Flow providers
// ---------------------------------------------------------------------------

class FlowProvider {
 public:
  virtual ~FlowProvider() = default;
  virtual MotionVectorField field_for(int src_index) = 0;
};

class EstimatorFlow : public FlowProvider {
 public:
  EstimatorFlow(const std::vector<Frame>& frames, MotionEstimatorParams params)
      : frames_(frames), params_(params) {}

  MotionVectorField field_for(int src_index) override {
    return estimate_motion(frames_[static_cast<std::size_t>(src_index)],
                           frames_[static_cast<std::size_t>(src_index) + 1], params_);
  }

 private:
  const std::vector<Frame>& frames_;
  MotionEstimatorParams params_;
};

class PreloadedFlow : public FlowProvider {
 public:
  explicit PreloadedFlow(std::vector<MotionVectorField> fields) {
    for (MotionVectorField& f : fields) {
      const int src = f.src_index;
      by_src_.emplace(src, std::move(f));
    }
  }

  MotionVectorField field_for(int src_index) override {
    auto it = by_src_.find(src_index);
    if (it == by_src_.end())
      throw InvalidInputError("flow source has no field for frame " +
                              std::to_string(src_index));
    return it->second;
  }

 private:
  std::map<int, MotionVectorField> by_src_;
};

std::unique_ptr<FlowProvider> make_flow_provider(const FlowSource& source,
                                                 const std::vector<Frame>& frames) {
  if (const auto* est = std::get_if<FlowFromEstimator>(&source)) {
    MotionEstimatorParams params = est->params;
    params.validate();
    return std::make_unique<EstimatorFlow>(frames, params);
  }
  std::vector<MotionVectorField> fields;
  if (const auto* sidecar = std::get_if<FlowFromSidecar>(&source)) {
    try {
      fields = read_mvf(sidecar->path);
    } catch (const Error& e) {
      throw ConfigError(std::string("flow sidecar: ") + e.what());
    }
  } else {
    fields = std::get<FlowFromFields>(source).fields;
  }
  for (const MotionVectorField& f : fields) {
    f.validate();
    if (f.frame_width != frames[0].width() || f.frame_height != frames[0].height())
      throw ConfigError("flow field for frame " + std::to_string(f.src_index) +
                        " is " + std::to_string(f.frame_width) + "x" +
                        std::to_string(f.frame_height) + " but frames are " +
                        std::to_string(frames[0].width()) + "x" +
                        std::to_string(frames[0].height()));
  }
  return std::make_unique<PreloadedFlow>(std::move(fields));
}

// ---------------------------------------------------------------------------
// Real-time plumbing: single-slot channels and the detector worker
// ---------------------------------------------------------------------------

template <typename T>
class SingleSlotChannel {
 public:
  // With one request in flight the slot is free whenever put() runs.
  void put(T value) {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return !slot_.has_value(); });
    slot_ = std::move(value);
    cv_.notify_all();
  }

  std::optional<T> try_take() {
    std::lock_guard lock(mu_);
    std::optional<T> out;
    out.swap(slot_);
    if (out) cv_.notify_all();
    return out;
  }

  // Waits up to `timeout` for a value; a put() wakes it immediately.
  std::optional<T> take_for(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, timeout, [&] { return slot_.has_value(); });
    std::optional<T> out;
    out.swap(slot_);
    if (out) cv_.notify_all();
    return out;
  }

  void notify_all() { cv_.notify_all(); }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::optional<T> slot_;
};

// Runs the detector off-thread: evaluate, impose the wall-clock latency,
// deliver. Frame-counted latency is enforced on the consumer side instead.
class DetectorWorker {
 public:
  DetectorWorker(Detector& detector, const LatencyModel& latency)
      : detector_(detector), latency_(latency) {
    thread_ = std::thread([this] { run(); });
  }

  ~DetectorWorker() {
    {
      std::lock_guard lock(stop_mu_);
      stop_ = true;
    }
    stop_cv_.notify_all();
    requests_.notify_all();
    thread_.join();
  }

  void submit(DetectorRequest request) { requests_.put(std::move(request)); }

  std::optional<DetectorResponse> try_take() {
    rethrow_if_failed();
    return responses_.try_take();
  }

  // Blocks until a response arrives; throws if the worker died instead.
  DetectorResponse take_blocking() {
    using namespace std::chrono_literals;
    while (true) {
      if (std::optional<DetectorResponse> r = responses_.take_for(1ms)) return *r;
      rethrow_if_failed();
      if (exited_.load())
        throw Error("detector worker stopped before delivering a response");
    }
  }

  void rethrow_if_failed() {
    std::lock_guard lock(stop_mu_);
    if (failure_) std::rethrow_exception(failure_);
  }

 private:
  void run() {
    using namespace std::chrono_literals;
    int ordinal = 0;
    while (!stop_.load()) {
      std::optional<DetectorRequest> req = requests_.take_for(50ms);
      if (!req) continue;
      try {
        const auto t0 = Clock::now();
        DetectionSet dets =
            detector_.detect({req->frame_index, preprocess_image(req->image)});
        const double ms = seconds_since(t0) * 1e3;
        const double sleep_ms = latency_.wall_clock_ms(ordinal++);
        if (sleep_ms > 0) {
          std::unique_lock lock(stop_mu_);
          stop_cv_.wait_for(lock,
                            std::chrono::duration<double, std::milli>(sleep_ms),
                            [&] { return stop_.load(); });
          if (stop_.load()) break;
        }
        responses_.put({req->frame_index, std::move(dets), ms});
      } catch (...) {
        std::lock_guard lock(stop_mu_);
        failure_ = std::current_exception();
        break;
      }
    }
    exited_.store(true);
  }

  Detector& detector_;
  LatencyModel latency_;
  SingleSlotChannel<DetectorRequest> requests_;
  SingleSlotChannel<DetectorResponse> responses_;
  std::mutex stop_mu_;
  std::condition_variable stop_cv_;
  std::atomic<bool> stop_{false};
  std::atomic<bool> exited_{false};
  std::exception_ptr failure_;
  std::thread thread_;
};

}  // namespace

// ---------------------------------------------------------------------------
// State machine
// ---------------------------------------------------------------------------

StepOutcome step(PipelineState& state, const MotionVectorField& field,
                 const std::optional<DetectorResponse>& result,
                 AggregationKind kind) {
  if (field.src_index != state.i)
    throw InvalidInputError("step expects field src " + std::to_string(state.i) +
                            ", got " + std::to_string(field.src_index));
  if (result) {
    if (!state.inflight)
      throw InvalidInputError("received a detector result with no request in flight");
    if (result->frame_index != state.inflight->frame_index)
      throw InvalidInputError(
          "detector result tag " + std::to_string(result->frame_index) +
          " does not match the in-flight request for frame " +
          std::to_string(state.inflight->frame_index));
  }

  state.buffer.push(field);
  const int next = state.i + 1;

  StepOutcome out;
  out.prior_age = next - state.m;
  if (result) {
    // Fresh but stale result: bring it up to `next` through the buffered
    // fields, then start a new buffer epoch and mark the resubmission.
    state.prior = replay(result->detections, state.buffer, result->frame_index, kind);
    state.prior.frame_index = next;
    state.m = next;
    state.buffer.clear();
    state.inflight = InflightRequest{next};
    out.applied_result = true;
  } else {
    state.prior = propagate(state.prior, field, kind);
    state.prior.frame_index = next;
  }
  state.i = next;
  out.emitted = state.prior;
  return out;
}

// ---------------------------------------------------------------------------
// Drivers
// ---------------------------------------------------------------------------

namespace {

void validate_config(const std::vector<Frame>& frames, const PipelineConfig& config) {
  if (frames.empty()) throw InvalidInputError("cannot run on an empty frame sequence");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].index != static_cast<int>(i))
      throw InvalidInputError("frame at position " + std::to_string(i) +
                              " is tagged index " + std::to_string(frames[i].index));
    if (frames[i].width() != frames[0].width() ||
        frames[i].height() != frames[0].height())
      throw InvalidInputError("frame " + std::to_string(i) + " size differs");
  }
  config.detector.latency.validate();
  if (config.mode == PipelineMode::kDeterministic &&
      config.detector.latency.kind != LatencyModel::Kind::kFixedFrames)
    throw ConfigError(
        "deterministic mode requires a frame-counted latency model (frames:N)");
}

std::shared_ptr<Detector> obtain_detector(const PipelineConfig& config) {
  if (config.detector_instance) return config.detector_instance;
  return std::shared_ptr<Detector>(make_detector(config.detector));
}

// Deterministic driver: the detector runs inline at submission time, results
// become visible at submit_frame + L, and no wall clock enters the schedule.
RunTrace run_deterministic(const std::vector<Frame>& frames,
                           const PipelineConfig& config, Detector& detector,
                           FlowProvider& flow) {
  const int n = static_cast<int>(frames.size());
  const LatencyModel& latency = config.detector.latency;
  RunTrace trace;
  trace.results.reserve(static_cast<std::size_t>(n));
  PipelineState state(config.buffer_capacity);

  struct Pending {
    int available_at;
    DetectorResponse response;
  };
  std::optional<Pending> pending;

  auto invoke = [&](int frame_index) {
    const auto t0 = Clock::now();
    DetectionSet dets = detector.detect(
        {frame_index, preprocess_image(frames[static_cast<std::size_t>(frame_index)])});
    DetectorResponse resp{frame_index, std::move(dets), seconds_since(t0) * 1e3};
    ++trace.requests_submitted;
    return resp;
  };

  {
    // Frame 0 blocks for its own result, then immediately resubmits so a
    // request is in flight when frame 1 arrives.
    const auto t0 = Clock::now();
    double excluded = 0;
    auto tb = Clock::now();
    DetectorResponse first = invoke(0);
    excluded += seconds_since(tb);
    trace.detector_ms.push_back(first.detector_ms);
    state.prior = std::move(first.detections);
    state.prior.frame_index = 0;
    state.m = 0;
    state.i = 0;
    state.inflight = InflightRequest{0};
    tb = Clock::now();
    pending = Pending{latency.available_at(0), invoke(0)};
    excluded += seconds_since(tb);
    trace.results.push_back({0, state.prior, seconds_since(t0) - excluded, 0});
  }

  for (int i = 1; i < n; ++i) {
    const auto t0 = Clock::now();
    double excluded = 0;
    try {
      MotionVectorField field = flow.field_for(i - 1);
      std::optional<DetectorResponse> maybe;
      if (pending && i >= pending->available_at) {
        trace.detector_ms.push_back(pending->response.detector_ms);
        maybe = std::move(pending->response);
        pending.reset();
      }
      StepOutcome out = step(state, field, maybe, config.aggregation);
      if (out.applied_result) {
        ++trace.results_applied;
        const auto tb = Clock::now();
        pending = Pending{latency.available_at(i), invoke(i)};
        excluded += seconds_since(tb);
      }
      trace.results.push_back(
          {i, std::move(out.emitted), seconds_since(t0) - excluded, out.prior_age});
    } catch (const PipelineError&) {
      throw;
    } catch (const Error& e) {
      throw PipelineError(i, e.what());
    }
  }
  return trace;
}

// Real-time driver: same schedule, but the detector lives on a worker thread
// and wall-clock latency models deliver whenever they deliver.
RunTrace run_real_time(const std::vector<Frame>& frames, const PipelineConfig& config,
                       Detector& detector, FlowProvider& flow) {
  const int n = static_cast<int>(frames.size());
  const LatencyModel& latency = config.detector.latency;
  const bool frame_counted = latency.kind == LatencyModel::Kind::kFixedFrames;
  RunTrace trace;
  trace.results.reserve(static_cast<std::size_t>(n));
  PipelineState state(config.buffer_capacity);
  DetectorWorker worker(detector, latency);

  int pending_submit_frame = 0;

  auto submit = [&](int frame_index) {
    worker.submit({frame_index, frames[static_cast<std::size_t>(frame_index)]});
    pending_submit_frame = frame_index;
    ++trace.requests_submitted;
  };

  {
    const auto t0 = Clock::now();
    double excluded = 0;
    auto tb = Clock::now();
    submit(0);
    DetectorResponse first = worker.take_blocking();
    excluded += seconds_since(tb);
    trace.detector_ms.push_back(first.detector_ms);
    state.prior = std::move(first.detections);
    state.prior.frame_index = 0;
    state.m = 0;
    state.i = 0;
    state.inflight = InflightRequest{0};
    submit(0);
    trace.results.push_back({0, state.prior, seconds_since(t0) - excluded, 0});
  }

  for (int i = 1; i < n; ++i) {
    const auto t0 = Clock::now();
    double excluded = 0;
    try {
      MotionVectorField field = flow.field_for(i - 1);
      std::optional<DetectorResponse> maybe;
      if (frame_counted) {
        // Due responses are awaited so frame-counted runs match the
        // deterministic driver exactly; the wait is detector time, not ours.
        if (state.inflight && i >= latency.available_at(pending_submit_frame)) {
          const auto tb = Clock::now();
          maybe = worker.take_blocking();
          excluded += seconds_since(tb);
        }
      } else {
        maybe = worker.try_take();
      }
      if (maybe) trace.detector_ms.push_back(maybe->detector_ms);
      StepOutcome out = step(state, field, maybe, config.aggregation);
      if (out.applied_result) {
        ++trace.results_applied;
        const auto tb = Clock::now();
        submit(i);
        excluded += seconds_since(tb);
      }
      trace.results.push_back(
          {i, std::move(out.emitted), seconds_since(t0) - excluded, out.prior_age});
    } catch (const PipelineError&) {
      throw;
    } catch (const Error& e) {
      throw PipelineError(i, e.what());
    }
  }
  return trace;
}

}  // namespace

RunTrace run_pipeline_traced(const std::vector<Frame>& frames,
                             const PipelineConfig& config) {
  validate_config(frames, config);
  std::shared_ptr<Detector> detector = obtain_detector(config);
  std::unique_ptr<FlowProvider> flow = make_flow_provider(config.flow, frames);
  if (config.mode == PipelineMode::kDeterministic)
    return run_deterministic(frames, config, *detector, *flow);
  return run_real_time(frames, config, *detector, *flow);
}

std::vector<FrameResult> run_pipeline(const std::vector<Frame>& frames,
                                      const PipelineConfig& config) {
  return run_pipeline_traced(frames, config).results;
}

LatencySummary measure_latency(const std::vector<FrameResult>& results) {
  if (results.empty())
    throw InvalidInputError("cannot summarize latency of an empty run");

  std::vector<double> lat;
  lat.reserve(results.size());
  double lat_sum = 0;
  double age_sum = 0;
  int age_max = 0;
  for (const FrameResult& r : results) {
    lat.push_back(r.step_latency_s);
    lat_sum += r.step_latency_s;
    age_sum += r.prior_age;
    age_max = std::max(age_max, r.prior_age);
  }
  std::sort(lat.begin(), lat.end());

  // Nearest-rank order statistic: the ceil(q*n)-th smallest value.
  auto rank = [&](double q) {
    const std::size_t n = lat.size();
    std::size_t r = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    r = std::clamp<std::size_t>(r, 1, n);
    return lat[r - 1];
  };

  LatencySummary s;
  s.mean_s = lat_sum / static_cast<double>(lat.size());
  s.median_s = rank(0.5);
  s.p95_s = rank(0.95);
  s.max_s = lat.back();
  s.prior_age_mean = age_sum / static_cast<double>(results.size());
  s.prior_age_max = age_max;
  return s;
}

}  // namespace movex
