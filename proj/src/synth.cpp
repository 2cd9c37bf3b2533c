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

#include "movex/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "movex/detectors.hpp"
#include "movex/error.hpp"

namespace movex {
namespace {

// Independent RNG stream per (seed, purpose, box) triple.
std::mt19937 sub_rng(std::uint32_t seed, std::uint32_t salt, std::uint32_t item) {
  std::uint32_t s = seed;
  s ^= salt + 0x9E3779B9u + (s << 6) + (s >> 2);
  s ^= (item + 1) * 0x85EBCA6Bu + (s << 6) + (s >> 2);
  return std::mt19937(s);
}

std::uint8_t noise_value(std::mt19937& rng, int base, int amplitude) {
  const int span = 2 * amplitude + 1;
  const int v = base - amplitude + static_cast<int>(rng() % span);
  return static_cast<std::uint8_t>(std::clamp(v, 0, 255));
}

PatrolBounds effective_bounds(const SynthSpec& spec, const SynthBoxSpec& box) {
  return box.bounds.value_or(PatrolBounds{0, 0, spec.width, spec.height});
}

// Advances one axis with reflect-before-move, so the per-frame displacement
// is always exactly |v| unless the walls leave no room at all.
void advance_axis(int& pos, int size, int& v, int lo, int hi) {
  if (v == 0) return;
  if (pos + v < lo || pos + v + size > hi) v = -v;
  if (pos + v >= lo && pos + v + size <= hi) pos += v;
}

struct BoxState {
  int x, y;
  int vx, vy;
  std::mt19937 walk_rng;
};

}  // namespace

void SynthSpec::validate() const {
  if (width < 1 || height < 1) throw ConfigError("synth frame size must be positive");
  if (frames < 1) throw ConfigError("synth frame count must be >= 1");
  if (background_base < 0 || background_base > 255 || background_amplitude < 0 ||
      background_amplitude > 255)
    throw ConfigError("synth background base/amplitude out of range");
  if (det_noise_stddev < 0) throw ConfigError("det noise stddev must be >= 0");
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    const SynthBoxSpec& box = boxes[b];
    const std::string tag = "synth box " + std::to_string(b);
    if (box.w < 1 || box.h < 1) throw ConfigError(tag + ": size must be positive");
    if (box.texture_base < 0 || box.texture_base > 255 || box.texture_amplitude < 0 ||
        box.texture_amplitude > 255)
      throw ConfigError(tag + ": texture base/amplitude out of range");
    if (box.motion == SynthBoxSpec::Motion::kRandomAxis) {
      if (box.axis != 'x' && box.axis != 'y')
        throw ConfigError(tag + ": axis must be 'x' or 'y'");
      if (box.speed < 0) throw ConfigError(tag + ": speed must be >= 0");
      if (box.persist < 1) throw ConfigError(tag + ": persist must be >= 1");
    }
    const PatrolBounds pb = effective_bounds(*this, box);
    if (pb.x_min < 0 || pb.y_min < 0 || pb.x_max > width || pb.y_max > height)
      throw ConfigError(tag + ": patrol bounds leave the frame");
    if (box.x < pb.x_min || box.y < pb.y_min || box.x + box.w > pb.x_max ||
        box.y + box.h > pb.y_max)
      throw ConfigError(tag + ": start position violates its patrol bounds");
  }
}

SynthSequence generate_synthetic(const SynthSpec& spec) {
  spec.validate();

  // Static background, drawn once.
  LumaPlane background(spec.height, spec.width);
  {
    std::mt19937 rng = sub_rng(spec.seed, 0xB0A0u, 0);
    for (int y = 0; y < spec.height; ++y)
      for (int x = 0; x < spec.width; ++x)
        background(y, x) =
            noise_value(rng, spec.background_base, spec.background_amplitude);
  }

  // Fixed texture patch per box, translated rigidly with it.
  std::vector<LumaPlane> textures;
  std::vector<BoxState> states;
  textures.reserve(spec.boxes.size());
  states.reserve(spec.boxes.size());
  for (std::size_t b = 0; b < spec.boxes.size(); ++b) {
    const SynthBoxSpec& box = spec.boxes[b];
    LumaPlane tex(box.h, box.w);
    std::mt19937 rng = sub_rng(spec.seed, 0x7E87u, static_cast<std::uint32_t>(b));
    for (int y = 0; y < box.h; ++y)
      for (int x = 0; x < box.w; ++x)
        tex(y, x) = noise_value(rng, box.texture_base, box.texture_amplitude);
    textures.push_back(std::move(tex));
    states.push_back({box.x, box.y, box.vx, box.vy,
                      sub_rng(spec.seed, 0x3A17u, static_cast<std::uint32_t>(b))});
  }

  std::mt19937 noise_rng = sub_rng(spec.seed, 0xD0E7u, 0);
  std::normal_distribution<double> jitter(0.0, spec.det_noise_stddev);

  SynthSequence seq;
  seq.frames.reserve(static_cast<std::size_t>(spec.frames));
  seq.detections.reserve(static_cast<std::size_t>(spec.frames));
  seq.gt.num_frames = spec.frames;

  for (int f = 0; f < spec.frames; ++f) {
    // Update velocities, then positions, then render the frame.
    for (std::size_t b = 0; b < spec.boxes.size(); ++b) {
      const SynthBoxSpec& box = spec.boxes[b];
      BoxState& st = states[b];
      if (f > 0) {
        if (box.motion == SynthBoxSpec::Motion::kRandomAxis &&
            (f - 1) % box.persist == 0) {
          const int dir = (st.walk_rng() & 1u) ? 1 : -1;
          st.vx = box.axis == 'x' ? dir * box.speed : 0;
          st.vy = box.axis == 'y' ? dir * box.speed : 0;
        }
        const PatrolBounds pb = effective_bounds(spec, box);
        advance_axis(st.x, box.w, st.vx, pb.x_min, pb.x_max);
        advance_axis(st.y, box.h, st.vy, pb.y_min, pb.y_max);
      }
    }

    Frame frame;
    frame.index = f;
    frame.luma = background;
    for (std::size_t b = 0; b < spec.boxes.size(); ++b)
      frame.luma.block(states[b].y, states[b].x, spec.boxes[b].h, spec.boxes[b].w) =
          textures[b];
    seq.frames.push_back(std::move(frame));

    std::vector<GtBox>& gt_boxes = seq.gt.frames[f];
    DetectionSet det;
    det.frame_index = f;
    for (std::size_t b = 0; b < spec.boxes.size(); ++b) {
      const SynthBoxSpec& box = spec.boxes[b];
      gt_boxes.push_back({static_cast<double>(states[b].x),
                          static_cast<double>(states[b].y),
                          static_cast<double>(box.w), static_cast<double>(box.h),
                          false});
      Detection d;
      d.x = states[b].x;
      d.y = states[b].y;
      d.w = box.w;
      d.h = box.h;
      if (spec.det_noise_stddev > 0) {
        d.x += jitter(noise_rng);
        d.y += jitter(noise_rng);
      }
      det.detections.push_back(d);
    }
    seq.detections.push_back(std::move(det));
  }
  return seq;
}

void write_synthetic(const SynthSequence& seq,
                     const std::filesystem::path& frames_dir,
                     const std::filesystem::path& gt_path,
                     const std::filesystem::path& det_path) {
  std::filesystem::create_directories(frames_dir);
  char name[32];
  for (const Frame& frame : seq.frames) {
    std::snprintf(name, sizeof(name), "frame_%06d.pgm", frame.index);
    write_pgm(frame, frames_dir / name);
  }

  std::ofstream gt_out(gt_path, std::ios::binary);
  if (!gt_out)
    throw InvalidInputError("cannot open " + gt_path.string() + " for writing");
  for (const auto& [frame, boxes] : seq.gt.frames) {
    for (std::size_t b = 0; b < boxes.size(); ++b) {
      const GtBox& box = boxes[b];
      gt_out << (frame + 1) << "," << (b + 1) << "," << box.x << "," << box.y << ","
             << box.w << "," << box.h << "," << (box.ignored ? 0 : 1) << ",1,1\n";
    }
  }
  if (!gt_out) throw InvalidInputError("short write while writing gt file");

  write_mot_detections(seq.detections, det_path);
}

namespace {

void reject_unknown_keys(const nlohmann::json& obj,
                         std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool ok = false;
    for (const char* name : allowed)
      if (key == name) ok = true;
    if (!ok) throw ConfigError("synth spec: unknown key '" + key + "' in " + where);
  }
}

}  // namespace

SynthSpec read_synth_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open synth spec " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("synth spec " + path.string() + ": " + e.what());
  }

  SynthSpec spec;
  try {
    reject_unknown_keys(doc,
                        {"width", "height", "frames", "seed", "background",
                         "det_noise_stddev", "boxes"},
                        "spec");
    spec.width = doc.value("width", spec.width);
    spec.height = doc.value("height", spec.height);
    spec.frames = doc.value("frames", spec.frames);
    spec.seed = doc.value("seed", spec.seed);
    if (doc.contains("background")) {
      const auto& bg = doc.at("background");
      reject_unknown_keys(bg, {"base", "amplitude"}, "background");
      spec.background_base = bg.value("base", spec.background_base);
      spec.background_amplitude = bg.value("amplitude", spec.background_amplitude);
    }
    spec.det_noise_stddev = doc.value("det_noise_stddev", spec.det_noise_stddev);
    for (const auto& jb : doc.value("boxes", nlohmann::json::array())) {
      reject_unknown_keys(jb, {"x", "y", "w", "h", "motion", "texture", "bounds"},
                          "box");
      SynthBoxSpec box;
      box.x = jb.at("x").get<int>();
      box.y = jb.at("y").get<int>();
      box.w = jb.at("w").get<int>();
      box.h = jb.at("h").get<int>();
      if (jb.contains("motion")) {
        const auto& jm = jb.at("motion");
        reject_unknown_keys(
            jm, {"type", "vx", "vy", "axis", "speed", "persist"}, "motion");
        const std::string type = jm.value("type", "constant");
        if (type == "constant") {
          box.motion = SynthBoxSpec::Motion::kConstant;
          box.vx = jm.value("vx", 0);
          box.vy = jm.value("vy", 0);
        } else if (type == "random_axis") {
          box.motion = SynthBoxSpec::Motion::kRandomAxis;
          const std::string axis = jm.value("axis", "y");
          if (axis.size() != 1)
            throw ConfigError("synth spec: axis must be 'x' or 'y'");
          box.axis = axis[0];
          box.speed = jm.value("speed", box.speed);
          box.persist = jm.value("persist", box.persist);
        } else {
          throw ConfigError("synth spec: unknown motion type '" + type + "'");
        }
      }
      if (jb.contains("texture")) {
        const auto& jt = jb.at("texture");
        reject_unknown_keys(jt, {"base", "amplitude"}, "texture");
        box.texture_base = jt.value("base", box.texture_base);
        box.texture_amplitude = jt.value("amplitude", box.texture_amplitude);
      }
      if (jb.contains("bounds")) {
        const auto& jb4 = jb.at("bounds");
        if (!jb4.is_array() || jb4.size() != 4)
          throw ConfigError("synth spec: bounds must be [x_min, y_min, x_max, y_max]");
        box.bounds = PatrolBounds{jb4[0].get<int>(), jb4[1].get<int>(),
                                  jb4[2].get<int>(), jb4[3].get<int>()};
      }
      spec.boxes.push_back(box);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("synth spec " + path.string() + ": " + e.what());
  }

  try {
    spec.validate();
  } catch (const ConfigError& e) {
    throw ConfigError("synth spec " + path.string() + ": " + e.what());
  }
  return spec;
}

}  // namespace movex
