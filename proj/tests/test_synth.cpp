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

#include <doctest.h>

#include <cmath>
#include <fstream>

#include "movex/detectors.hpp"
#include "movex/error.hpp"
#include "movex/synth.hpp"
#include "test_util.hpp"

using namespace movex;

namespace {

SynthSpec walker_spec() {
  SynthSpec spec;
  spec.width = 96;
  spec.height = 96;
  spec.frames = 40;
  spec.seed = 77;
  SynthBoxSpec b;
  b.x = 40;
  b.y = 30;
  b.w = 16;
  b.h = 20;
  b.motion = SynthBoxSpec::Motion::kRandomAxis;
  b.axis = 'y';
  b.speed = 2;
  b.persist = 5;
  b.bounds = PatrolBounds{36, 8, 60, 88};
  spec.boxes = {b};
  return spec;
}

}  // namespace

TEST_CASE("generation is deterministic in the seed") {
  SynthSpec spec = walker_spec();
  SynthSequence a = generate_synthetic(spec);
  SynthSequence b = generate_synthetic(spec);

  REQUIRE(a.frames.size() == b.frames.size());
  for (std::size_t i = 0; i < a.frames.size(); ++i)
    CHECK((a.frames[i].luma == b.frames[i].luma).all());
  for (int f = 0; f < spec.frames; ++f) {
    CHECK(a.gt.frames.at(f)[0].x == b.gt.frames.at(f)[0].x);
    CHECK(a.gt.frames.at(f)[0].y == b.gt.frames.at(f)[0].y);
  }

  spec.seed = 78;
  SynthSequence c = generate_synthetic(spec);
  bool any_pixel_differs = false;
  for (std::size_t i = 0; i < a.frames.size() && !any_pixel_differs; ++i)
    any_pixel_differs = !(a.frames[i].luma == c.frames[i].luma).all();
  CHECK(any_pixel_differs);
}

TEST_CASE("constant motion advances by the velocity and reflects at bounds") {
  SynthSpec spec;
  spec.width = 64;
  spec.height = 32;
  spec.frames = 25;
  SynthBoxSpec b;
  b.x = 40;
  b.y = 8;
  b.w = 12;
  b.h = 12;
  b.motion = SynthBoxSpec::Motion::kConstant;
  b.vx = 3;
  b.vy = 0;
  spec.boxes = {b};
  SynthSequence seq = generate_synthetic(spec);

  for (int f = 0; f < spec.frames; ++f) {
    const GtBox& box = seq.gt.frames.at(f)[0];
    CHECK(box.x >= 0);
    CHECK(box.x + box.w <= spec.width);
    CHECK(box.y == 8.0);
    if (f > 0) {
      const GtBox& prev = seq.gt.frames.at(f - 1)[0];
      CHECK(std::abs(box.x - prev.x) == 3.0);  // reflect-before-move
    }
  }
  // 40 -> 49 ascending, bounce off x_max (52 = 64 - 12), then descend.
  CHECK(seq.gt.frames.at(1)[0].x == 43.0);
  CHECK(seq.gt.frames.at(4)[0].x == 52.0);
  CHECK(seq.gt.frames.at(5)[0].x == 49.0);
}

TEST_CASE("random-axis motion moves exactly speed pixels along one axis") {
  SynthSpec spec = walker_spec();
  const PatrolBounds pb = *spec.boxes[0].bounds;
  SynthSequence seq = generate_synthetic(spec);

  for (int f = 1; f < spec.frames; ++f) {
    const GtBox& cur = seq.gt.frames.at(f)[0];
    const GtBox& prev = seq.gt.frames.at(f - 1)[0];
    CHECK(cur.x == prev.x);
    CHECK(std::abs(cur.y - prev.y) == 2.0);
    CHECK(cur.y >= pb.y_min);
    CHECK(cur.y + cur.h <= pb.y_max);
  }
}

TEST_CASE("box pixels carry their texture and the background stays put") {
  SynthSpec spec = walker_spec();
  SynthSequence seq = generate_synthetic(spec);

  const Frame& f0 = seq.frames[0];
  const Frame& f1 = seq.frames[1];
  // A pixel far from the patrol corridor never changes.
  CHECK(f0.luma(5, 5) == f1.luma(5, 5));

  // The texture travels rigidly: compare the box interior across frames.
  const GtBox& b0 = seq.gt.frames.at(0)[0];
  const GtBox& b1 = seq.gt.frames.at(1)[0];
  for (int dy = 0; dy < 4; ++dy)
    for (int dx = 0; dx < 4; ++dx)
      CHECK(f0.luma(static_cast<int>(b0.y) + dy, static_cast<int>(b0.x) + dx) ==
            f1.luma(static_cast<int>(b1.y) + dy, static_cast<int>(b1.x) + dx));
}

TEST_CASE("detections equal ground truth without noise and drift with it") {
  SynthSpec spec = walker_spec();
  SynthSequence clean = generate_synthetic(spec);
  for (int f = 0; f < spec.frames; ++f) {
    const GtBox& g = clean.gt.frames.at(f)[0];
    const Detection& d = clean.detections[f].detections[0];
    CHECK(d.x == g.x);
    CHECK(d.y == g.y);
    CHECK(d.w == g.w);
    CHECK(d.h == g.h);
    CHECK(d.score == 1.0);
  }

  spec.det_noise_stddev = 1.5;
  SynthSequence noisy = generate_synthetic(spec);
  bool any_differs = false;
  for (int f = 0; f < spec.frames; ++f) {
    const GtBox& g = noisy.gt.frames.at(f)[0];
    const Detection& d = noisy.detections[f].detections[0];
    if (d.x != g.x || d.y != g.y) any_differs = true;
    CHECK(d.w == g.w);
    CHECK(d.h == g.h);
  }
  CHECK(any_differs);
}

TEST_CASE("write_synthetic emits loadable frames and parseable annotations") {
  movex_test::TempDir tmp;
  SynthSpec spec = walker_spec();
  spec.frames = 6;
  SynthSequence seq = generate_synthetic(spec);
  write_synthetic(seq, tmp / "frames", tmp / "gt.txt", tmp / "det.txt");

  std::vector<Frame> frames = load_frame_dir(tmp / "frames");
  REQUIRE(frames.size() == seq.frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    CHECK(frames[i].index == static_cast<int>(i));
    CHECK((frames[i].luma == seq.frames[i].luma).all());
  }

  GroundTruth gt = read_mot_ground_truth(tmp / "gt.txt");
  CHECK(gt.num_frames == spec.frames);
  CHECK(gt.num_evaluated_boxes() == spec.frames);
  for (int f = 0; f < spec.frames; ++f)
    CHECK(gt.frames.at(f)[0].x == seq.gt.frames.at(f)[0].x);

  auto dets = read_mot_detections(tmp / "det.txt");
  for (int f = 0; f < spec.frames; ++f) {
    REQUIRE(dets.count(f) == 1);
    CHECK(dets.at(f).detections[0].x == seq.detections[f].detections[0].x);
  }
}

TEST_CASE("synth spec JSON round trips through the reader") {
  movex_test::TempDir tmp;
  const auto path = tmp / "spec.json";
  std::ofstream(path) << R"({
    "width": 128, "height": 72, "frames": 9, "seed": 5,
    "background": {"base": 100, "amplitude": 6},
    "det_noise_stddev": 0.5,
    "boxes": [
      {"x": 10, "y": 12, "w": 20, "h": 24,
       "motion": {"type": "constant", "vx": 2, "vy": -1},
       "texture": {"base": 140, "amplitude": 90}},
      {"x": 60, "y": 20, "w": 16, "h": 16,
       "motion": {"type": "random_axis", "axis": "x", "speed": 3, "persist": 4},
       "bounds": [50, 20, 100, 40]}
    ]
  })";

  SynthSpec spec = read_synth_spec(path);
  CHECK(spec.width == 128);
  CHECK(spec.height == 72);
  CHECK(spec.frames == 9);
  CHECK(spec.seed == 5);
  CHECK(spec.background_base == 100);
  CHECK(spec.background_amplitude == 6);
  CHECK(spec.det_noise_stddev == doctest::Approx(0.5));
  REQUIRE(spec.boxes.size() == 2);
  CHECK(spec.boxes[0].motion == SynthBoxSpec::Motion::kConstant);
  CHECK(spec.boxes[0].vx == 2);
  CHECK(spec.boxes[0].vy == -1);
  CHECK(spec.boxes[0].texture_base == 140);
  CHECK_FALSE(spec.boxes[0].bounds.has_value());
  CHECK(spec.boxes[1].motion == SynthBoxSpec::Motion::kRandomAxis);
  CHECK(spec.boxes[1].axis == 'x');
  CHECK(spec.boxes[1].speed == 3);
  CHECK(spec.boxes[1].persist == 4);
  REQUIRE(spec.boxes[1].bounds.has_value());
  CHECK(spec.boxes[1].bounds->x_max == 100);
}

TEST_CASE("synth spec reader fails loudly on typos and bad values") {
  movex_test::TempDir tmp;
  auto write_spec = [&](const std::string& body) {
    const auto path = tmp / "bad.json";
    std::ofstream(path) << body;
    return path;
  };

  CHECK_THROWS_AS(read_synth_spec(tmp / "missing.json"), ConfigError);
  CHECK_THROWS_AS(read_synth_spec(write_spec("{not json")), ConfigError);
  CHECK_THROWS_WITH_AS(read_synth_spec(write_spec(R"({"widht": 64})")),
                       doctest::Contains("unknown key"), ConfigError);
  CHECK_THROWS_AS(read_synth_spec(write_spec(
                      R"({"boxes": [{"x": 0, "y": 0, "w": 8, "h": 8,
                          "motion": {"type": "teleport"}}]})")),
                  ConfigError);
  CHECK_THROWS_AS(read_synth_spec(write_spec(
                      R"({"boxes": [{"x": 0, "y": 0, "w": 8, "h": 8,
                          "bounds": [0, 0, 10]}]})")),
                  ConfigError);
  // Validation failures: zero frames, box outside its bounds.
  CHECK_THROWS_AS(read_synth_spec(write_spec(R"({"frames": 0})")), ConfigError);
  CHECK_THROWS_AS(read_synth_spec(write_spec(
                      R"({"width": 32, "height": 32,
                          "boxes": [{"x": 30, "y": 0, "w": 8, "h": 8}]})")),
                  ConfigError);
}

TEST_CASE("spec validation rejects inconsistent boxes directly") {
  SynthSpec spec = walker_spec();
  SUBCASE("bad axis") {
    spec.boxes[0].axis = 'z';
    CHECK_THROWS_AS(generate_synthetic(spec), ConfigError);
  }
  SUBCASE("zero persist") {
    spec.boxes[0].persist = 0;
    CHECK_THROWS_AS(generate_synthetic(spec), ConfigError);
  }
  SUBCASE("bounds outside the frame") {
    spec.boxes[0].bounds = PatrolBounds{0, 0, 200, 200};
    CHECK_THROWS_AS(generate_synthetic(spec), ConfigError);
  }
  SUBCASE("degenerate box") {
    spec.boxes[0].w = 0;
    CHECK_THROWS_AS(generate_synthetic(spec), ConfigError);
  }
}
