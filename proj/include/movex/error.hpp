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

#ifndef MOVEX_ERROR_HPP_
#define MOVEX_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace movex {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed in-memory input: mismatched dimensions, non-consecutive frame
// indices, empty sequences and the like.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// Malformed file content. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what), line_(0) {}
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

// FlowBuffer capacity exhausted.
class BufferOverflowError : public Error {
 public:
  using Error::Error;
};

// Invalid run configuration, detected before any frame is processed.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Failure while processing a specific frame of a run.
class PipelineError : public Error {
 public:
  PipelineError(int frame_index, const std::string& what)
      : Error("frame " + std::to_string(frame_index) + ": " + what),
        frame_index_(frame_index) {}

  int frame_index() const { return frame_index_; }

 private:
  int frame_index_;
};

}  // namespace movex

#endif  // MOVEX_ERROR_HPP_
