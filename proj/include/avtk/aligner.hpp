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

#include <cstddef>
#include <iosfwd>
#include <string>

#include "avtk/encoder.hpp"

namespace avtk {

/// Sliding-window scheme mapping encoder frames onto video frames: window
/// length w, stride s, symmetric zero padding p on each side. The defaults
/// (16, 2, 7) map a 50 Hz encoder onto 25 FPS video, one window per frame.
struct AlignConfig {
  int window = 16;   // w, >= 1
  int stride = 2;    // s, >= 1
  int padding = 7;   // p, >= 0, zeros on each side
  double video_fps = 25.0;

  void validate() const;
};

/// Per-video-frame feature windows, (n_frames, window, dim) row-major.
struct AlignedFeatureTensor {
  std::vector<float> data;
  std::size_t n_frames = 0;
  int window = 0;
  int dim = 0;
  double video_fps = 25.0;
  Provenance source_provenance = Provenance::reference;

  float at(std::size_t i, int j, int c) const {
    return data[(i * window + j) * static_cast<std::size_t>(dim) + c];
  }
};

/// Number of stride-s windows of length w over a sequence of t_enc frames
/// padded by p on both sides: floor((t_enc + 2p - w) / s) + 1.
/// Throws ContractError when the window exceeds the padded sequence.
std::size_t window_count(std::size_t t_enc, const AlignConfig& cfg);

/// Gather window i, slot j from padded encoder row i*s + j (padded index 0 is
/// unpadded index -p; pad rows are exact zeros). The encoder frame rate must
/// satisfy rate / fps == stride; otherwise an AlignmentError carrying both
/// rates is thrown, unless allow_rate_override is set, in which case the
/// stride is recomputed as round(rate / fps).
AlignedFeatureTensor align(const EmbeddingMatrix& e, const AlignConfig& cfg,
                           bool allow_rate_override = false);

/// Center of video frame i in unpadded encoder coordinates:
/// i*s + (w-1)/2 - p. Fractional for even w; not rounded.
/// Valid for 0 <= i < window_count(t_enc, cfg).
double frame_center(std::size_t i, const AlignConfig& cfg, std::size_t t_enc);

/// Write an aligned tensor file (kind "aligned", header carries "fps").
void export_aligned(const AlignedFeatureTensor& t, const std::string& path);
void export_aligned(const AlignedFeatureTensor& t, std::ostream& out);

}  // namespace avtk
