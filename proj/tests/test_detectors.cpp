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

#include <fstream>
#include <random>
#include <sstream>

#include "movex/detectors.hpp"
#include "movex/error.hpp"
#include "test_util.hpp"

using namespace movex;

namespace {

DetectorRequest request_for(int frame_index) {
  DetectorRequest req;
  req.frame_index = frame_index;
  req.image.index = frame_index;
  req.image.luma = LumaPlane::Constant(8, 8, 0);
  return req;
}

Detection det(double x, double y, double w, double h, double score) {
  Detection d;
  d.x = x;
  d.y = y;
  d.w = w;
  d.h = h;
  d.score = score;
  return d;
}

}  // namespace

TEST_CASE("latency model factories, schedules, and validation") {
  LatencyModel frames = LatencyModel::fixed_frames(5);
  CHECK(frames.kind == LatencyModel::Kind::kFixedFrames);
  CHECK(frames.available_at(12) == 17);
  frames.validate();

  LatencyModel wall = LatencyModel::fixed_wall_clock(7.5);
  CHECK(wall.wall_clock_ms(0) == doctest::Approx(7.5));
  CHECK(wall.wall_clock_ms(99) == doctest::Approx(7.5));
  wall.validate();

  LatencyModel sched = LatencyModel::per_request_schedule({1.0, 2.0, 3.0});
  CHECK(sched.wall_clock_ms(0) == doctest::Approx(1.0));
  CHECK(sched.wall_clock_ms(2) == doctest::Approx(3.0));
  CHECK(sched.wall_clock_ms(10) == doctest::Approx(3.0));  // last entry repeats
  sched.validate();

  CHECK_THROWS_AS(LatencyModel::fixed_frames(-1).validate(), ConfigError);
  CHECK_THROWS_AS(LatencyModel::fixed_wall_clock(-0.5).validate(), ConfigError);
  CHECK_THROWS_AS(LatencyModel::per_request_schedule({}).validate(), ConfigError);
  CHECK_THROWS_AS(LatencyModel::per_request_schedule({1.0, -1.0}).validate(),
                  ConfigError);
}

TEST_CASE("preprocess_image is the identity") {
  std::mt19937 rng(8);
  Frame f = movex_test::random_frame(rng, 17, 9, 3);
  Frame g = preprocess_image(f);
  CHECK(g.index == f.index);
  CHECK((g.luma == f.luma).all());
}

TEST_CASE("file oracle echoes its file, thresholds scores, and tags frames") {
  movex_test::TempDir tmp;
  const auto path = tmp / "dets.txt";
  {
    std::ofstream out(path);
    out << "1,-1,10,20,30,40,0.9,-1,-1,-1\n";
    out << "1,-1,50,60,5,5,0.2,-1,-1,-1\n";
    out << "3,-1,1.5,2.25,3,4,0.5,-1,-1,-1\n";
  }

  SUBCASE("no threshold") {
    FileOracle oracle(path, 0.0);
    DetectionSet f0 = oracle.detect(request_for(0));
    CHECK(f0.frame_index == 0);
    REQUIRE(f0.detections.size() == 2);
    CHECK(f0.detections[0].x == doctest::Approx(10.0));
    CHECK(f0.detections[0].score == doctest::Approx(0.9));
    CHECK(f0.detections[0].class_id == 1);
    CHECK(f0.detections[1].score == doctest::Approx(0.2));

    DetectionSet f2 = oracle.detect(request_for(2));
    CHECK(f2.frame_index == 2);
    REQUIRE(f2.detections.size() == 1);
    CHECK(f2.detections[0].x == doctest::Approx(1.5));
    CHECK(f2.detections[0].y == doctest::Approx(2.25));
  }

  SUBCASE("threshold filters rows") {
    FileOracle oracle(path, 0.5);
    CHECK(oracle.detect(request_for(0)).detections.size() == 1);
    CHECK(oracle.detect(request_for(2)).detections.size() == 1);
  }

  SUBCASE("absent frames yield empty tagged sets") {
    FileOracle oracle(path, 0.0);
    DetectionSet f7 = oracle.detect(request_for(7));
    CHECK(f7.frame_index == 7);
    CHECK(f7.detections.empty());
  }

  SUBCASE("malformed files fail at construction") {
    const auto bad = tmp / "bad.txt";
    std::ofstream(bad) << "1,-1,10,20,30\n";
    CHECK_THROWS_AS(FileOracle(bad, 0.0), ConfigError);
    CHECK_THROWS_AS(FileOracle(tmp / "missing.txt", 0.0), ConfigError);
  }
}

TEST_CASE("scripted mock returns responses in call order and then runs dry") {
  std::vector<std::vector<Detection>> script = {
      {det(1, 1, 2, 2, 0.5)},
      {},
      {det(3, 3, 4, 4, 0.25), det(5, 5, 6, 6, 0.75)},
  };
  ScriptedMock mock(script);

  DetectionSet first = mock.detect(request_for(10));
  CHECK(first.frame_index == 10);
  REQUIRE(first.detections.size() == 1);
  CHECK(first.detections[0].x == doctest::Approx(1.0));

  CHECK(mock.detect(request_for(11)).detections.empty());

  DetectionSet third = mock.detect(request_for(2));
  CHECK(third.frame_index == 2);
  CHECK(third.detections.size() == 2);

  DetectionSet exhausted = mock.detect(request_for(3));
  CHECK(exhausted.frame_index == 3);
  CHECK(exhausted.detections.empty());
}

TEST_CASE("scripted mock parses its JSON script and rejects bad files") {
  movex_test::TempDir tmp;
  const auto path = tmp / "script.json";
  std::ofstream(path)
      << R"([[{"x":1,"y":2,"w":3,"h":4,"score":0.5}],[],)"
         R"([{"x":9,"y":8,"w":7,"h":6}]])";

  ScriptedMock mock(path);
  DetectionSet first = mock.detect(request_for(0));
  REQUIRE(first.detections.size() == 1);
  CHECK(first.detections[0].score == doctest::Approx(0.5));
  CHECK(mock.detect(request_for(1)).detections.empty());
  DetectionSet third = mock.detect(request_for(2));
  REQUIRE(third.detections.size() == 1);
  CHECK(third.detections[0].score == doctest::Approx(1.0));  // score default

  const auto bad = tmp / "bad.json";
  std::ofstream(bad) << R"({"not":"an array"})";
  CHECK_THROWS_AS(ScriptedMock{bad}, ConfigError);
  const auto negative = tmp / "neg.json";
  std::ofstream(negative) << R"([[{"x":1,"y":2,"w":-3,"h":4}]])";
  CHECK_THROWS_AS(ScriptedMock{negative}, ConfigError);
  CHECK_THROWS_AS(ScriptedMock{tmp / "missing.json"}, ConfigError);
}

TEST_CASE("make_detector builds the configured kind") {
  movex_test::TempDir tmp;
  const auto det_path = tmp / "d.txt";
  std::ofstream(det_path) << "1,-1,1,2,3,4,0.5,-1,-1,-1\n";
  const auto script_path = tmp / "s.json";
  std::ofstream(script_path) << "[[]]";

  DetectorSpec spec;
  spec.kind = DetectorSpec::Kind::kFileOracle;
  spec.path = det_path;
  auto oracle = make_detector(spec);
  CHECK(oracle->detect(request_for(0)).detections.size() == 1);

  spec.kind = DetectorSpec::Kind::kScriptedMock;
  spec.path = script_path;
  auto mock = make_detector(spec);
  CHECK(mock->detect(request_for(0)).detections.empty());
}

TEST_CASE("mot detection files round trip losslessly") {
  std::mt19937 rng(9090);
  std::uniform_real_distribution<double> coord(-5.0, 500.0);
  std::uniform_real_distribution<double> size(0.5, 80.0);
  std::uniform_real_distribution<double> score(0.0, 1.0);

  std::vector<DetectionSet> sets;
  for (int f = 0; f < 20; ++f) {
    DetectionSet set;
    set.frame_index = f;
    const int n = static_cast<int>(rng() % 5);
    for (int b = 0; b < n; ++b)
      set.detections.push_back(
          det(coord(rng), coord(rng), size(rng), size(rng), score(rng)));
    sets.push_back(set);
  }

  std::stringstream buf;
  write_mot_detections(sets, buf);
  std::map<int, DetectionSet> back = read_mot_detections(buf);

  for (const auto& set : sets) {
    if (set.detections.empty()) {
      CHECK(back.find(set.frame_index) == back.end());
      continue;
    }
    auto it = back.find(set.frame_index);
    REQUIRE(it != back.end());
    REQUIRE(it->second.detections.size() == set.detections.size());
    for (std::size_t i = 0; i < set.detections.size(); ++i) {
      const Detection& a = set.detections[i];
      const Detection& b = it->second.detections[i];
      CHECK(a.x == b.x);  // exact: shortest round-trip formatting
      CHECK(a.y == b.y);
      CHECK(a.w == b.w);
      CHECK(a.h == b.h);
      CHECK(a.score == b.score);
    }
  }
}

TEST_CASE("mot reader tolerates 7-field rows and blank lines, rejects junk") {
  auto parse = [](const std::string& text) {
    std::stringstream buf(text);
    return read_mot_detections(buf);
  };

  auto ok = parse("\n1,-1,1,2,3,4,0.5\n\n2,-1,5,6,7,8,0.25,-1,-1,-1\n");
  CHECK(ok.size() == 2);
  CHECK(ok.at(0).detections.size() == 1);
  CHECK(ok.at(1).detections.size() == 1);

  CHECK_THROWS_WITH_AS(parse("1,-1,1,2,3\n"), doctest::Contains("line 1"),
                       ParseError);
  CHECK_THROWS_WITH_AS(parse("1,-1,1,2,3,4,0.5\nx,-1,1,2,3,4,0.5\n"),
                       doctest::Contains("line 2"), ParseError);
  CHECK_THROWS_AS(parse("0,-1,1,2,3,4,0.5\n"), ParseError);   // frame < 1
  CHECK_THROWS_AS(parse("1,-1,1,2,0,4,0.5\n"), ParseError);   // w <= 0
}
