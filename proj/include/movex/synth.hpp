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

#ifndef MOVEX_SYNTH_HPP_
#define MOVEX_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "movex/detection.hpp"
#include "movex/eval.hpp"
#include "movex/frame.hpp"

namespace movex {

// Rectangle a box may not leave; velocity reflects at the walls.
struct PatrolBounds {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;  // exclusive
  int y_max = 0;
};

struct SynthBoxSpec {
  int x = 0;  // start position, integer pixels
  int y = 0;
  int w = 16;
  int h = 16;

  enum class Motion { kConstant, kRandomAxis };
  Motion motion = Motion::kConstant;

  // kConstant: fixed per-frame velocity, reflected at the patrol bounds.
  int vx = 0;
  int vy = 0;

  // kRandomAxis: moves `speed` px every frame along one axis, direction
  // re-drawn from the box's RNG stream every `persist` frames.
  char axis = 'y';  // 'x' or 'y'
  int speed = 2;
  int persist = 5;

  std::optional<PatrolBounds> bounds;  // defaults to the full frame

  // Texture drawn inside the box, translated rigidly with it.
  int texture_base = 128;
  int texture_amplitude = 127;
};

struct SynthSpec {
  int width = 640;
  int height = 480;
  int frames = 30;
  std::uint32_t seed = 1;

  // Static background texture.
  int background_base = 128;
  int background_amplitude = 12;

  // Gaussian jitter applied to det.txt positions (gt stays exact).
  double det_noise_stddev = 0.0;

  std::vector<SynthBoxSpec> boxes;

  void validate() const;  // throws ConfigError
};

// Loads a trajectory spec from JSON; unknown keys are rejected so typos fail
// loudly. Throws ConfigError on unreadable or inconsistent specs.
SynthSpec read_synth_spec(const std::filesystem::path& path);

struct SynthSequence {
  std::vector<Frame> frames;
  GroundTruth gt;
  std::vector<DetectionSet> detections;  // gt boxes + optional noise, score 1
};

// Renders the sequence deterministically from the seed: same spec, same
// bytes. Boxes later in the list draw over earlier ones.
SynthSequence generate_synthetic(const SynthSpec& spec);

// Writes frames_dir/frame_NNNNNN.pgm plus MOT gt and det files.
void write_synthetic(const SynthSequence& seq,
                     const std::filesystem::path& frames_dir,
                     const std::filesystem::path& gt_path,
                     const std::filesystem::path& det_path);

}  // namespace movex

#endif  // MOVEX_SYNTH_HPP_
