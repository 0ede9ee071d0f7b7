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

#include "avtk/encoder.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <random>

#include "avtk/errors.hpp"
#include "avtk/tensor_file.hpp"

namespace avtk {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Standard normal draws from mt19937_64 via Box-Muller. The distribution
// classes in <random> are implementation-defined, so the transform is spelled
// out here to keep projections bit-identical across standard libraries.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1], u2 in [0, 1), both with 53 uniform bits.
    const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

 private:
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace

double gelu(double x) {
  // Exact Gaussian-CDF form: x * Phi(x).
  return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0)));
}

ReferenceEncoderParams ReferenceEncoderParams::from_seed(std::uint64_t seed, int n_mels,
                                                         int out_dim, bool gelu_enabled) {
  if (n_mels < 1 || out_dim < 1) {
    throw ContractError("reference encoder: n_mels and out_dim must be positive");
  }
  ReferenceEncoderParams p;
  p.seed = seed;
  p.in_dim = 2 * n_mels;
  p.out_dim = out_dim;
  p.gelu_enabled = gelu_enabled;

  // Row-major fill with N(0, 1/in_dim) entries; the in_dim scaling keeps
  // output magnitudes comparable to the inputs.
  GaussianSource gauss(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(p.in_dim));
  p.proj.resize(static_cast<std::size_t>(p.in_dim) * p.out_dim);
  for (float& w : p.proj) {
    w = static_cast<float>(scale * gauss.next());
  }
  return p;
}

EmbeddingMatrix encode_reference(const MelSpectrogram& m, const ReferenceEncoderParams& p) {
  if (m.t_mel < 1) {
    throw ContractError("encode_reference: empty spectrogram");
  }
  if (2 * m.n_mels != p.in_dim) {
    throw ContractError("encode_reference: params built for " + std::to_string(p.in_dim / 2) +
                        " mel bands, spectrogram has " + std::to_string(m.n_mels));
  }
  if (p.proj.size() != static_cast<std::size_t>(p.in_dim) * p.out_dim) {
    throw ContractError("encode_reference: projection matrix shape mismatch");
  }

  EmbeddingMatrix e;
  e.t_enc = (m.t_mel + 1) / 2;  // ceil(t_mel / 2)
  e.dim = p.out_dim;
  e.enc_frame_rate_hz = m.frame_rate_hz / 2.0;
  e.provenance = Provenance::reference;
  e.rows.resize(e.t_enc * static_cast<std::size_t>(e.dim));

  // Row t = gelu(P^T . [mel[2t]; mel[2t+1]]); an odd tail pairs with zeros.
  std::vector<double> x(p.in_dim);
  for (std::size_t t = 0; t < e.t_enc; ++t) {
    for (int i = 0; i < m.n_mels; ++i) {
      x[i] = m.at(2 * t, i);
      x[m.n_mels + i] = 2 * t + 1 < m.t_mel ? m.at(2 * t + 1, i) : 0.0;
    }
    for (int c = 0; c < p.out_dim; ++c) {
      double acc = 0.0;
      for (int i = 0; i < p.in_dim; ++i) {
        acc += x[i] * p.proj[static_cast<std::size_t>(i) * p.out_dim + c];
      }
      e.at(t, c) = static_cast<float>(p.gelu_enabled ? gelu(acc) : acc);
    }
  }
  return e;
}

EmbeddingMatrix import_embeddings(const std::string& path) {
  const Tensor t = read_tensor(path);
  if (t.kind != "emb") {
    throw FormatError("embedding import: tensor kind is \"" + t.kind + "\", expected \"emb\"");
  }
  if (t.shape.size() != 2) {
    throw ContractError("embedding import: expected a 2-D tensor, got rank " +
                        std::to_string(t.shape.size()));
  }
  if (!t.extra.contains("rate_hz") || !t.extra["rate_hz"].is_number()) {
    throw FormatError("embedding import: header missing \"rate_hz\"");
  }
  if (!t.extra.contains("dim") || !t.extra["dim"].is_number_integer()) {
    throw FormatError("embedding import: header missing \"dim\"");
  }
  if (t.extra["dim"].get<std::size_t>() != t.shape[1]) {
    throw FormatError("embedding import: header \"dim\" disagrees with shape");
  }
  for (float v : t.data) {
    if (!std::isfinite(v)) {
      throw FormatError("embedding import: payload contains non-finite values");
    }
  }

  EmbeddingMatrix e;
  e.t_enc = t.shape[0];
  e.dim = static_cast<int>(t.shape[1]);
  e.enc_frame_rate_hz = t.extra["rate_hz"].get<double>();
  e.provenance = Provenance::imported;
  e.rows = t.data;
  return e;
}

void export_embeddings(const EmbeddingMatrix& e, std::ostream& out) {
  Tensor t;
  t.shape = {e.t_enc, static_cast<std::size_t>(e.dim)};
  t.data = e.rows;
  t.kind = "emb";
  t.extra["rate_hz"] = e.enc_frame_rate_hz;
  t.extra["dim"] = e.dim;
  write_tensor(t, out);
}

void export_embeddings(const EmbeddingMatrix& e, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot create embedding tensor file: " + path);
  }
  export_embeddings(e, out);
}

}  // namespace avtk
