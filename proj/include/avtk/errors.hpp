// Copyright 2026 The avtk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace avtk {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// File exists but its contents do not match the expected format.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// File is well formed but uses a codec/layout this library does not handle.
class UnsupportedError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// A precondition or shape contract was violated.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Encoder frame rate does not match the stride/fps contract of the aligner.
/// Carries both rates so callers can report or recompute the stride.
class AlignmentError : public ContractError {
 public:
  AlignmentError(const std::string& msg, double enc_rate_hz, double video_fps, int stride)
      : ContractError(msg), enc_rate_hz(enc_rate_hz), video_fps(video_fps), stride(stride) {}

  double enc_rate_hz;
  double video_fps;
  int stride;
};

/// Evaluation manifest is inconsistent with the corpus it describes.
class ManifestError : public Error {
 public:
  using Error::Error;
};

}  // namespace avtk
