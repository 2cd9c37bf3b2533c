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

#include "movex/frame.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "movex/error.hpp"

namespace movex {
namespace {

// Next whitespace-delimited token, skipping '#' comments per the PNM spec.
std::string next_pnm_token(std::istream& in) {
  std::string token;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  while (c != EOF && !std::isspace(c) && c != '#') {
    token.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (c == '#') in.unget();
  return token;
}

int parse_pnm_int(std::istream& in, const char* what) {
  std::string token = next_pnm_token(in);
  if (token.empty()) throw ParseError(std::string("missing ") + what + " in PNM header");
  try {
    std::size_t used = 0;
    int value = std::stoi(token, &used);
    if (used != token.size() || value < 0) throw std::invalid_argument(token);
    return value;
  } catch (const std::exception&) {
    throw ParseError(std::string("bad ") + what + " '" + token + "' in PNM header");
  }
}

}  // namespace

std::uint8_t bt601_luma(int r, int g, int b) {
  int y = (299 * r + 587 * g + 114 * b + 500) / 1000;
  return static_cast<std::uint8_t>(std::clamp(y, 0, 255));
}

Frame read_pnm(std::istream& in, int index) {
  std::string magic = next_pnm_token(in);
  if (magic != "P5" && magic != "P6")
    throw ParseError("unsupported PNM magic '" + magic + "' (want P5 or P6)");
  const bool color = magic == "P6";

  int width = parse_pnm_int(in, "width");
  int height = parse_pnm_int(in, "height");
  int maxval = parse_pnm_int(in, "maxval");
  if (width <= 0 || height <= 0)
    throw ParseError("non-positive PNM dimensions " + std::to_string(width) + "x" +
                     std::to_string(height));
  if (maxval <= 0 || maxval > 255)
    throw ParseError("unsupported PNM maxval " + std::to_string(maxval));

  // Exactly one whitespace byte separates the header from the raster.
  const std::size_t pixel_bytes = color ? 3 : 1;
  const std::size_t raster_size =
      static_cast<std::size_t>(width) * height * pixel_bytes;
  std::vector<char> raster(raster_size);
  in.read(raster.data(), static_cast<std::streamsize>(raster_size));
  if (static_cast<std::size_t>(in.gcount()) != raster_size)
    throw ParseError("truncated PNM raster (expected " +
                     std::to_string(raster_size) + " bytes)");

  Frame frame;
  frame.index = index;
  frame.luma.resize(height, width);
  const auto* p = reinterpret_cast<const unsigned char*>(raster.data());
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (color) {
        frame.luma(y, x) = bt601_luma(p[0], p[1], p[2]);
        p += 3;
      } else {
        frame.luma(y, x) = *p++;
      }
    }
  }
  return frame;
}

Frame read_pnm(const std::filesystem::path& path, int index) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot open frame file " + path.string());
  try {
    return read_pnm(in, index);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_pgm(const Frame& frame, std::ostream& out) {
  if (frame.width() <= 0 || frame.height() <= 0)
    throw InvalidInputError("cannot write empty frame");
  out << "P5\n" << frame.width() << " " << frame.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.luma.data()),
            static_cast<std::streamsize>(frame.luma.size()));
  if (!out) throw InvalidInputError("short write while writing PGM");
}

void write_pgm(const Frame& frame, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInputError("cannot open " + path.string() + " for writing");
  write_pgm(frame, out);
}

std::vector<Frame> load_frame_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec))
    throw InvalidInputError("frame directory " + dir.string() + " does not exist");

  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    if (ext == ".pgm" || ext == ".ppm") paths.push_back(entry.path());
  }
  if (paths.empty())
    throw InvalidInputError("frame directory " + dir.string() +
                            " holds no .pgm/.ppm files");
  std::sort(paths.begin(), paths.end());

  std::vector<Frame> frames;
  frames.reserve(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    frames.push_back(read_pnm(paths[i], static_cast<int>(i)));
    if (i > 0 && (frames[i].width() != frames[0].width() ||
                  frames[i].height() != frames[0].height()))
      throw InvalidInputError("frame size mismatch in " + dir.string() + ": " +
                              paths[i].filename().string());
  }
  return frames;
}

}  // namespace movex
