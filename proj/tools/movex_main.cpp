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

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "movex/detectors.hpp"
#include "movex/error.hpp"
#include "movex/eval.hpp"
#include "movex/motion.hpp"
#include "movex/pipeline.hpp"
#include "movex/synth.hpp"

namespace {

using movex::ConfigError;

movex::SearchMethod parse_search(const std::string& name) {
  if (name == "full") return movex::SearchMethod::kFullSearch;
  if (name == "threestep") return movex::SearchMethod::kThreeStep;
  throw ConfigError("unknown search method '" + name + "' (want full|threestep)");
}

movex::AggregationKind parse_agg(const std::string& name) {
  if (name == "median") return movex::AggregationKind::kMedianXY;
  if (name == "mean") return movex::AggregationKind::kMeanXY;
  throw ConfigError("unknown aggregation '" + name + "' (want median|mean)");
}

movex::PipelineMode parse_mode(const std::string& name) {
  if (name == "deterministic") return movex::PipelineMode::kDeterministic;
  if (name == "realtime") return movex::PipelineMode::kRealTime;
  throw ConfigError("unknown mode '" + name + "' (want realtime|deterministic)");
}

movex::FlowSource parse_flow(const std::string& value,
                             const movex::MotionEstimatorParams& params) {
  if (value == "estimate") return movex::FlowFromEstimator{params};
  const std::string prefix = "sidecar:";
  if (value.rfind(prefix, 0) == 0) {
    std::filesystem::path path = value.substr(prefix.size());
    if (!std::filesystem::exists(path))
      throw ConfigError("flow sidecar " + path.string() + " does not exist");
    return movex::FlowFromSidecar{path};
  }
  throw ConfigError("bad --flow '" + value + "' (want estimate|sidecar:PATH)");
}

movex::DetectorSpec parse_detector(const std::string& value, double score_threshold,
                                   const movex::LatencyModel& latency) {
  movex::DetectorSpec spec;
  spec.score_threshold = score_threshold;
  spec.latency = latency;
  const std::string oracle = "oracle:";
  const std::string mock = "mock:";
  if (value.rfind(oracle, 0) == 0) {
    spec.kind = movex::DetectorSpec::Kind::kFileOracle;
    spec.path = value.substr(oracle.size());
  } else if (value.rfind(mock, 0) == 0) {
    spec.kind = movex::DetectorSpec::Kind::kScriptedMock;
    spec.path = value.substr(mock.size());
  } else {
    throw ConfigError("bad --detector '" + value + "' (want oracle:PATH|mock:PATH)");
  }
  if (!std::filesystem::exists(spec.path))
    throw ConfigError("detector file " + spec.path.string() + " does not exist");
  return spec;
}

movex::LatencyModel parse_latency(const std::string& value) {
  auto colon = value.find(':');
  if (colon != std::string::npos) {
    const std::string kind = value.substr(0, colon);
    const std::string arg = value.substr(colon + 1);
    try {
      if (kind == "frames") return movex::LatencyModel::fixed_frames(std::stoi(arg));
      if (kind == "ms") return movex::LatencyModel::fixed_wall_clock(std::stod(arg));
    } catch (const std::exception&) {
      throw ConfigError("bad --det-latency argument '" + arg + "'");
    }
    if (kind == "schedule") {
      std::ifstream in(arg);
      if (!in) throw ConfigError("cannot open latency schedule " + arg);
      std::vector<double> ms;
      std::string line;
      int line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        try {
          ms.push_back(std::stod(line));
        } catch (const std::exception&) {
          throw ConfigError("latency schedule " + arg + " line " +
                            std::to_string(line_no) + ": bad number '" + line + "'");
        }
      }
      return movex::LatencyModel::per_request_schedule(std::move(ms));
    }
  }
  throw ConfigError("bad --det-latency '" + value +
                    "' (want frames:N|ms:N|schedule:PATH)");
}

void check_writable(const std::filesystem::path& path, const char* what) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw ConfigError(std::string("cannot open ") + what + " " +
                              path.string() + " for writing");
}

nlohmann::json stats_json(const movex::RunTrace& trace,
                          const movex::LatencySummary& summary) {
  double det_sum = 0;
  double det_max = 0;
  for (double ms : trace.detector_ms) {
    det_sum += ms;
    det_max = std::max(det_max, ms);
  }
  const double det_count = static_cast<double>(trace.detector_ms.size());
  nlohmann::json doc;
  doc["frames"] = trace.results.size();
  doc["requests_submitted"] = trace.requests_submitted;
  doc["results_applied"] = trace.results_applied;
  doc["step_latency_ms"] = {{"mean", summary.mean_s * 1e3},
                            {"median", summary.median_s * 1e3},
                            {"p95", summary.p95_s * 1e3},
                            {"max", summary.max_s * 1e3}};
  doc["prior_age_frames"] = {{"mean", summary.prior_age_mean},
                             {"max", summary.prior_age_max}};
  doc["detector_latency_ms"] = {
      {"mean", det_count > 0 ? det_sum / det_count : 0.0},
      {"max", det_max},
      {"count", trace.detector_ms.size()}};
  return doc;
}

// Shared flag set for the subcommands that execute the pipeline.
struct RunOptions {
  std::string frames_dir;
  std::string flow = "estimate";
  int block_size = 16;
  int search_range = 16;
  std::string search = "full";
  std::string agg = "median";
  std::string detector;
  std::string det_latency = "frames:0";
  double score_threshold = 0.0;
  std::string mode = "deterministic";
  std::string out_dets;
  std::string out_stats;
};

void add_run_options(CLI::App* cmd, RunOptions* opt, bool want_out_dets) {
  cmd->add_option("--frames", opt->frames_dir, "directory of .pgm/.ppm frames")
      ->required();
  cmd->add_option("--flow", opt->flow, "motion source: estimate|sidecar:PATH");
  cmd->add_option("--block-size", opt->block_size, "estimator block size");
  cmd->add_option("--search-range", opt->search_range, "estimator search range");
  cmd->add_option("--search", opt->search, "search method: full|threestep");
  cmd->add_option("--agg", opt->agg, "vector aggregation: median|mean");
  cmd->add_option("--detector", opt->detector, "detector: oracle:PATH|mock:PATH")
      ->required();
  cmd->add_option("--det-latency", opt->det_latency,
                  "latency model: frames:N|ms:N|schedule:PATH");
  cmd->add_option("--score-threshold", opt->score_threshold,
                  "drop oracle rows scoring below this");
  cmd->add_option("--mode", opt->mode, "execution mode: realtime|deterministic");
  if (want_out_dets)
    cmd->add_option("--out-dets", opt->out_dets, "output det file")->required();
  cmd->add_option("--out-stats", opt->out_stats, "output stats JSON");
}

movex::RunTrace execute_run(const RunOptions& opt) {
  movex::MotionEstimatorParams params;
  params.block_size = opt.block_size;
  params.search_range = opt.search_range;
  params.method = parse_search(opt.search);

  movex::PipelineConfig config;
  config.aggregation = parse_agg(opt.agg);
  config.mode = parse_mode(opt.mode);
  config.flow = parse_flow(opt.flow, params);
  config.detector =
      parse_detector(opt.detector, opt.score_threshold, parse_latency(opt.det_latency));
  if (!opt.out_dets.empty()) check_writable(opt.out_dets, "--out-dets");
  if (!opt.out_stats.empty()) check_writable(opt.out_stats, "--out-stats");

  std::vector<movex::Frame> frames = movex::load_frame_dir(opt.frames_dir);
  return movex::run_pipeline_traced(frames, config);
}

int cmd_run(const RunOptions& opt) {
  movex::RunTrace trace = execute_run(opt);

  std::vector<movex::DetectionSet> sets;
  sets.reserve(trace.results.size());
  for (const movex::FrameResult& r : trace.results) sets.push_back(r.detections);
  movex::write_mot_detections(sets, std::filesystem::path(opt.out_dets));

  const movex::LatencySummary summary = movex::measure_latency(trace.results);
  if (!opt.out_stats.empty()) {
    std::ofstream out(opt.out_stats, std::ios::binary | std::ios::trunc);
    out << stats_json(trace, summary).dump(2) << "\n";
    if (!out) throw movex::InvalidInputError("short write to " + opt.out_stats);
  }
  std::cout << "processed " << trace.results.size() << " frames, median step "
            << summary.median_s * 1e3 << " ms, max prior age "
            << summary.prior_age_max << " frames\n";
  return 0;
}

int cmd_bench(const RunOptions& opt) {
  movex::RunTrace trace = execute_run(opt);
  const movex::LatencySummary summary = movex::measure_latency(trace.results);
  const nlohmann::json doc = stats_json(trace, summary);
  if (!opt.out_stats.empty()) {
    std::ofstream out(opt.out_stats, std::ios::binary | std::ios::trunc);
    out << doc.dump(2) << "\n";
    if (!out) throw movex::InvalidInputError("short write to " + opt.out_stats);
  }
  std::cout << doc.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MOVEX: detection propagation from coarse motion vectors"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read defaults from an INI/TOML file");

  // run
  auto* run = app.add_subcommand("run", "propagate detections over a frame sequence");
  RunOptions run_opt;
  add_run_options(run, &run_opt, /*want_out_dets=*/true);

  // bench
  auto* bench = app.add_subcommand("bench", "run the pipeline and report latency stats");
  RunOptions bench_opt;
  add_run_options(bench, &bench_opt, /*want_out_dets=*/false);

  // estimate-flow
  auto* ef = app.add_subcommand("estimate-flow",
                                "precompute an MVF motion sidecar for a sequence");
  std::string ef_frames, ef_out, ef_search = "full";
  int ef_block = 16, ef_range = 16;
  ef->add_option("--frames", ef_frames, "directory of .pgm/.ppm frames")->required();
  ef->add_option("--out", ef_out, "output MVF path")->required();
  ef->add_option("--block-size", ef_block, "estimator block size");
  ef->add_option("--search-range", ef_range, "estimator search range");
  ef->add_option("--search", ef_search, "search method: full|threestep");

  // synth
  auto* synth = app.add_subcommand("synth", "render a synthetic sequence from a spec");
  std::string sy_spec, sy_frames, sy_gt, sy_dets;
  std::uint32_t sy_seed = 0;
  synth->add_option("--spec", sy_spec, "trajectory spec JSON")->required();
  synth->add_option("--out-frames", sy_frames, "output frame directory")->required();
  synth->add_option("--out-gt", sy_gt, "output MOT gt file")->required();
  synth->add_option("--out-dets", sy_dets, "output MOT det file")->required();
  synth->add_option("--seed", sy_seed, "override the spec's seed");

  // eval
  auto* eval = app.add_subcommand("eval", "score predictions against ground truth");
  std::string ev_pred, ev_gt, ev_out;
  double ev_iou = 0.5;
  eval->add_option("--pred", ev_pred, "predictions det file")->required();
  eval->add_option("--gt", ev_gt, "MOT gt file")->required();
  eval->add_option("--iou", ev_iou, "IoU threshold");
  eval->add_option("--out", ev_out, "write the AP report JSON here too");

  CLI11_PARSE(app, argc, argv);

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (app.got_subcommand(run)) return cmd_run(run_opt);
    if (app.got_subcommand(bench)) return cmd_bench(bench_opt);

    if (app.got_subcommand(ef)) {
      movex::MotionEstimatorParams params;
      params.block_size = ef_block;
      params.search_range = ef_range;
      params.method = parse_search(ef_search);
      params.validate();
      check_writable(ef_out, "--out");
      std::vector<movex::Frame> frames = movex::load_frame_dir(ef_frames);
      if (frames.size() < 2)
        throw movex::InvalidInputError("need at least 2 frames to estimate flow");
      std::vector<movex::MotionVectorField> fields;
      fields.reserve(frames.size() - 1);
      for (std::size_t i = 0; i + 1 < frames.size(); ++i)
        fields.push_back(movex::estimate_motion(frames[i], frames[i + 1], params));
      movex::write_mvf(fields, std::filesystem::path(ef_out));
      std::cout << "wrote " << fields.size() << " motion fields to " << ef_out << "\n";
      return 0;
    }

    if (app.got_subcommand(synth)) {
      movex::SynthSpec spec = movex::read_synth_spec(sy_spec);
      if (synth->count("--seed") > 0) spec.seed = sy_seed;
      movex::SynthSequence seq = movex::generate_synthetic(spec);
      movex::write_synthetic(seq, sy_frames, sy_gt, sy_dets);
      std::cout << "wrote " << seq.frames.size() << " frames, "
                << spec.boxes.size() << " boxes per frame\n";
      return 0;
    }

    if (app.got_subcommand(eval)) {
      std::map<int, movex::DetectionSet> by_frame =
          movex::read_mot_detections(std::filesystem::path(ev_pred));
      movex::GroundTruth gt =
          movex::read_mot_ground_truth(std::filesystem::path(ev_gt));
      std::vector<movex::DetectionSet> preds;
      preds.reserve(by_frame.size());
      for (auto& [frame, set] : by_frame) preds.push_back(std::move(set));
      movex::ApReport report = movex::average_precision(preds, gt, ev_iou);
      if (!ev_out.empty()) movex::write_json(report, ev_out);
      std::cout << movex::to_json(report) << "\n";
      return 0;
    }
  } catch (const movex::Error& e) {
    std::cerr << "movex " << cmd << ": error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
