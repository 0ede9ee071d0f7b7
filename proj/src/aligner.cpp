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

#include "avtk/aligner.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <ostream>
#include <string>

#include "avtk/errors.hpp"
#include "avtk/tensor_file.hpp"

namespace avtk {

void AlignConfig::validate() const {
  if (window < 1) {
    throw ContractError("align config: window must be >= 1");
  }
  if (stride < 1) {
    throw ContractError("align config: stride must be >= 1");
  }
  if (padding < 0) {
    throw ContractError("align config: padding must be >= 0");
  }
  if (!(video_fps > 0.0)) {
    throw ContractError("align config: video_fps must be positive");
  }
}

std::size_t window_count(std::size_t t_enc, const AlignConfig& cfg) {
  cfg.validate();
  if (t_enc < 1) {
    throw ContractError("window_count: need at least one encoder frame");
  }
  const std::size_t padded = t_enc + 2 * static_cast<std::size_t>(cfg.padding);
  if (static_cast<std::size_t>(cfg.window) > padded) {
    throw ContractError("window_count: window of " + std::to_string(cfg.window) +
                        " exceeds padded length " + std::to_string(padded));
  }
  return (padded - cfg.window) / cfg.stride + 1;
}

AlignedFeatureTensor align(const EmbeddingMatrix& e, const AlignConfig& cfg,
                           bool allow_rate_override) {
  cfg.validate();
  if (e.t_enc < 1) {
    throw ContractError("align: empty embedding matrix");
  }

  // The stride is the number of encoder frames consumed per video frame, so
  // the encoder rate must be exactly stride x fps. Importers running at other
  // rates may opt into a recomputed stride instead of silent feature drift.
  AlignConfig eff = cfg;
  const double rate_ratio = e.enc_frame_rate_hz / cfg.video_fps;
  if (std::abs(rate_ratio - cfg.stride) > 1e-9) {
    if (!allow_rate_override) {
      throw AlignmentError("align: encoder rate " + std::to_string(e.enc_frame_rate_hz) +
                               " Hz / video fps " + std::to_string(cfg.video_fps) +
                               " does not equal stride " + std::to_string(cfg.stride),
                           e.enc_frame_rate_hz, cfg.video_fps, cfg.stride);
    }
    eff.stride = static_cast<int>(std::lround(rate_ratio));
    if (eff.stride < 1) {
      throw ContractError("align: recomputed stride is zero (rate " +
                          std::to_string(e.enc_frame_rate_hz) + " Hz below fps)");
    }
  }

  const std::size_t n = window_count(e.t_enc, eff);
  AlignedFeatureTensor out;
  out.n_frames = n;
  out.window = eff.window;
  out.dim = e.dim;
  out.video_fps = eff.video_fps;
  out.source_provenance = e.provenance;
  out.data.assign(n * static_cast<std::size_t>(eff.window) * e.dim, 0.0f);

  // Pure gather: window i, slot j reads padded row i*s + j, where padded
  // index 0 sits at unpadded index -p. Pad rows stay exact zeros.
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < eff.window; ++j) {
      const long long src = static_cast<long long>(i) * eff.stride + j - eff.padding;
      if (src < 0 || src >= static_cast<long long>(e.t_enc)) {
        continue;
      }
      std::memcpy(&out.data[(i * eff.window + j) * static_cast<std::size_t>(e.dim)],
                  &e.rows[static_cast<std::size_t>(src) * e.dim],
                  sizeof(float) * static_cast<std::size_t>(e.dim));
    }
  }
  return out;
}

double frame_center(std::size_t i, const AlignConfig& cfg, std::size_t t_enc) {
  const std::size_t n = window_count(t_enc, cfg);
  if (i >= n) {
    throw ContractError("frame_center: index " + std::to_string(i) + " out of range [0, " +
                        std::to_string(n) + ")");
  }
  return static_cast<double>(i) * cfg.stride + (cfg.window - 1) / 2.0 - cfg.padding;
}

void export_aligned(const AlignedFeatureTensor& t, std::ostream& out) {
  Tensor file;
  file.shape = {t.n_frames, static_cast<std::size_t>(t.window), static_cast<std::size_t>(t.dim)};
  file.data = t.data;
  file.kind = "aligned";
  file.extra["fps"] = t.video_fps;
  write_tensor(file, out);
}

void export_aligned(const AlignedFeatureTensor& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot create aligned tensor file: " + path);
  }
  export_aligned(t, out);
}

}  // namespace avtk
