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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "avtk/audio.hpp"

namespace avtk {

enum class Provenance { reference, imported };

/// Encoder output: one row per encoder frame, `dim` channels. The reference
/// encoder halves the mel frame rate, so enc_frame_rate_hz is 50 at defaults.
struct EmbeddingMatrix {
  std::vector<float> rows;  // (t_enc, dim) row-major float32
  std::size_t t_enc = 0;
  int dim = 384;
  double enc_frame_rate_hz = 50.0;
  Provenance provenance = Provenance::reference;

  float at(std::size_t t, int c) const { return rows[t * static_cast<std::size_t>(dim) + c]; }
  float& at(std::size_t t, int c) { return rows[t * static_cast<std::size_t>(dim) + c]; }
};

/// Deterministic stand-in for a learned speech encoder. It reproduces the
/// encoder geometry (2x temporal downsample, 384-dim output) with a fixed
/// pseudo-random projection instead of trained weights:
///
///   row t = gelu(P^T . concat(mel[2t], mel[2t+1]))
///
/// P has shape (2*n_mels, out_dim) and entries drawn N(0, 1/(2*n_mels)) from
/// mt19937_64(seed) via the Box-Muller transform (pairs generated in row-major
/// order, trailing draw of an odd count discarded). GELU is the exact Gaussian
/// CDF form x * Phi(x). Odd mel lengths pair the last frame with a zero frame.
struct ReferenceEncoderParams {
  std::uint64_t seed = 0;
  int in_dim = 160;   // 2 * n_mels
  int out_dim = 384;  // embedding dimension C
  bool gelu_enabled = true;
  std::vector<float> proj;  // (in_dim, out_dim) row-major, derived from seed

  static ReferenceEncoderParams from_seed(std::uint64_t seed, int n_mels = 80,
                                          int out_dim = 384, bool gelu_enabled = true);
};

/// Exact GELU, x * Phi(x) with the Gaussian CDF.
double gelu(double x);

/// Run the reference encoder over a (normalized) mel spectrogram.
/// Output shape is (ceil(t_mel / 2), out_dim).
EmbeddingMatrix encode_reference(const MelSpectrogram& m, const ReferenceEncoderParams& p);

/// Read an embedding tensor file (kind "emb"). The header must carry
/// "rate_hz" and "dim"; the payload must be 2-D and finite.
EmbeddingMatrix import_embeddings(const std::string& path);

/// Write an embedding tensor file (kind "emb") that re-imports bit-identically.
void export_embeddings(const EmbeddingMatrix& e, const std::string& path);
void export_embeddings(const EmbeddingMatrix& e, std::ostream& out);

}  // namespace avtk
