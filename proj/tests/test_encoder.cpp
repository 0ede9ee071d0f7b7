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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <avtk/encoder.hpp>
#include <avtk/errors.hpp>
#include <avtk/tensor_file.hpp>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "helpers.hpp"
#include "oracles.hpp"

using avtk::EmbeddingMatrix;
using avtk::MelSpectrogram;
using avtk::Provenance;
using avtk::ReferenceEncoderParams;

namespace {

MelSpectrogram make_mel(std::size_t t_mel, int n_mels, const std::vector<float>& values) {
  MelSpectrogram m;
  m.t_mel = t_mel;
  m.n_mels = n_mels;
  m.frame_rate_hz = 100.0;
  m.config = avtk::MelConfig::for_rate(16000);
  m.frames = values;
  return m;
}

MelSpectrogram random_mel(test::Rng& rng, std::size_t t_mel, int n_mels) {
  std::vector<float> v(t_mel * static_cast<std::size_t>(n_mels));
  for (float& x : v) {
    x = static_cast<float>(rng.uniform(-1.5, 1.0));
  }
  return make_mel(t_mel, n_mels, v);
}

}  // namespace

// ---------------------------------------------------------------------------
// GELU
// ---------------------------------------------------------------------------

TEST_CASE("gelu matches its gaussian-cdf definition") {
  CHECK(avtk::gelu(0.0) == 0.0);
  CHECK(avtk::gelu(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-14));
  CHECK(avtk::gelu(-1.0) == doctest::Approx(-0.15865525393145707).epsilon(1e-14));
  CHECK(avtk::gelu(10.0) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(std::abs(avtk::gelu(-10.0)) < 1e-22);

  // Independent erfc-based evaluation across the active range.
  for (double x = -6.0; x <= 6.0; x += 0.37) {
    CHECK(avtk::gelu(x) == doctest::Approx(oracle::gelu_cdf(x)).epsilon(1e-13));
  }
}

// ---------------------------------------------------------------------------
// Parameter generation
// ---------------------------------------------------------------------------

TEST_CASE("from_seed is deterministic and seed-sensitive") {
  const auto a = ReferenceEncoderParams::from_seed(42);
  const auto b = ReferenceEncoderParams::from_seed(42);
  const auto c = ReferenceEncoderParams::from_seed(43);

  CHECK(a.in_dim == 160);
  CHECK(a.out_dim == 384);
  REQUIRE(a.proj.size() == 160 * 384);
  CHECK(std::memcmp(a.proj.data(), b.proj.data(), a.proj.size() * sizeof(float)) == 0);

  std::size_t diffs = 0;
  for (std::size_t i = 0; i < a.proj.size(); ++i) {
    diffs += a.proj[i] != c.proj[i];
  }
  CHECK(diffs > a.proj.size() / 2);
}

TEST_CASE("projection entries have the n(0, 1/in_dim) moments") {
  const auto p = ReferenceEncoderParams::from_seed(7);
  double mean = 0.0, sq = 0.0;
  for (float w : p.proj) {
    mean += w;
    sq += static_cast<double>(w) * w;
  }
  const double n = static_cast<double>(p.proj.size());
  mean /= n;
  const double stdev = std::sqrt(sq / n - mean * mean);
  const double expected_std = 1.0 / std::sqrt(160.0);

  CHECK(std::abs(mean) < 4.0 * expected_std / std::sqrt(n));
  CHECK(stdev == doctest::Approx(expected_std).epsilon(0.02));
}

// ---------------------------------------------------------------------------
// Encoding
// ---------------------------------------------------------------------------

TEST_CASE("output length is ceil(t_mel / 2) and the rate halves") {
  const auto p = ReferenceEncoderParams::from_seed(0, 4, 8);
  test::Rng rng(11);

  CHECK(avtk::encode_reference(random_mel(rng, 1, 4), p).t_enc == 1);
  CHECK(avtk::encode_reference(random_mel(rng, 2, 4), p).t_enc == 1);
  CHECK(avtk::encode_reference(random_mel(rng, 3, 4), p).t_enc == 2);
  CHECK(avtk::encode_reference(random_mel(rng, 3000, 4), p).t_enc == 1500);

  for (int it = 0; it < 20; ++it) {
    const std::size_t t_mel = static_cast<std::size_t>(rng.uniform_int(1, 400));
    const EmbeddingMatrix e = avtk::encode_reference(random_mel(rng, t_mel, 4), p);
    CHECK(e.t_enc == (t_mel + 1) / 2);
    CHECK(e.dim == 8);
    CHECK(e.enc_frame_rate_hz == 50.0);
    CHECK(e.provenance == Provenance::reference);
  }
}

TEST_CASE("a zero spectrogram encodes to zero rows") {
  const auto p = ReferenceEncoderParams::from_seed(5);
  const MelSpectrogram m = make_mel(10, 80, std::vector<float>(10 * 80, 0.0f));
  const EmbeddingMatrix e = avtk::encode_reference(m, p);
  REQUIRE(e.t_enc == 5);
  for (float v : e.rows) {
    CHECK(v == 0.0f);
  }
}

TEST_CASE("rows match a re-derived projection + gelu") {
  test::Rng rng(21);
  const int n_mels = 6, out_dim = 10;
  const auto p = ReferenceEncoderParams::from_seed(99, n_mels, out_dim);

  for (std::size_t t_mel : {1u, 4u, 7u}) {
    const MelSpectrogram m = random_mel(rng, t_mel, n_mels);
    const EmbeddingMatrix e = avtk::encode_reference(m, p);

    for (std::size_t t = 0; t < e.t_enc; ++t) {
      std::vector<double> x(2 * n_mels, 0.0);
      for (int i = 0; i < n_mels; ++i) {
        x[i] = m.at(2 * t, i);
        if (2 * t + 1 < t_mel) {
          x[n_mels + i] = m.at(2 * t + 1, i);
        }
      }
      const auto expected = oracle::project_gelu(x, p.proj, 2 * n_mels, out_dim, true);
      for (int c = 0; c < out_dim; ++c) {
        CHECK(e.at(t, c) == doctest::Approx(expected[c]).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("disabling gelu leaves the pure projection") {
  test::Rng rng(31);
  const auto p = ReferenceEncoderParams::from_seed(3, 5, 7, /*gelu_enabled=*/false);
  const MelSpectrogram m = random_mel(rng, 4, 5);
  const EmbeddingMatrix e = avtk::encode_reference(m, p);

  for (std::size_t t = 0; t < e.t_enc; ++t) {
    std::vector<double> x(10, 0.0);
    for (int i = 0; i < 5; ++i) {
      x[i] = m.at(2 * t, i);
      x[5 + i] = m.at(2 * t + 1, i);
    }
    const auto expected = oracle::project_gelu(x, p.proj, 10, 7, false);
    for (int c = 0; c < 7; ++c) {
      CHECK(e.at(t, c) == doctest::Approx(expected[c]).epsilon(1e-6));
    }
  }
}

TEST_CASE("an odd tail pairs the last frame with zeros") {
  test::Rng rng(77);
  const auto p = ReferenceEncoderParams::from_seed(8, 4, 6);
  const MelSpectrogram odd = random_mel(rng, 5, 4);

  // Same data with an explicit zero frame appended: identical embeddings.
  std::vector<float> padded = odd.frames;
  padded.insert(padded.end(), 4, 0.0f);
  const MelSpectrogram even = make_mel(6, 4, padded);

  const EmbeddingMatrix a = avtk::encode_reference(odd, p);
  const EmbeddingMatrix b = avtk::encode_reference(even, p);
  REQUIRE(a.t_enc == 3);
  REQUIRE(b.t_enc == 3);
  CHECK(std::memcmp(a.rows.data(), b.rows.data(), a.rows.size() * sizeof(float)) == 0);
}

TEST_CASE("encoding is bit-deterministic") {
  test::Rng rng(123);
  const auto p = ReferenceEncoderParams::from_seed(1);
  const MelSpectrogram m = random_mel(rng, 64, 80);
  const EmbeddingMatrix a = avtk::encode_reference(m, p);
  const EmbeddingMatrix b = avtk::encode_reference(m, p);
  CHECK(std::memcmp(a.rows.data(), b.rows.data(), a.rows.size() * sizeof(float)) == 0);
}

TEST_CASE("encode rejects mismatched bands and empty input") {
  const auto p = ReferenceEncoderParams::from_seed(0, 4, 8);
  test::Rng rng(5);
  CHECK_THROWS_AS(avtk::encode_reference(random_mel(rng, 4, 80), p), avtk::ContractError);
  CHECK_THROWS_AS(avtk::encode_reference(make_mel(0, 4, {}), p), avtk::ContractError);
}

// ---------------------------------------------------------------------------
// Import / export
// ---------------------------------------------------------------------------

TEST_CASE("embedding round trip is bit-identical") {
  test::TempDir tmp;
  test::Rng rng(55);
  const auto p = ReferenceEncoderParams::from_seed(9, 8, 12);
  const EmbeddingMatrix e = avtk::encode_reference(random_mel(rng, 20, 8), p);

  const auto path = tmp.file("emb.bin");
  avtk::export_embeddings(e, path);
  const EmbeddingMatrix back = avtk::import_embeddings(path);

  CHECK(back.t_enc == e.t_enc);
  CHECK(back.dim == e.dim);
  CHECK(back.enc_frame_rate_hz == e.enc_frame_rate_hz);
  CHECK(back.provenance == Provenance::imported);
  REQUIRE(back.rows.size() == e.rows.size());
  CHECK(std::memcmp(back.rows.data(), e.rows.data(), e.rows.size() * sizeof(float)) == 0);
}

TEST_CASE("import validates kind, rank, header fields and payload") {
  test::TempDir tmp;

  auto write_raw = [&](const std::string& name, const std::string& header,
                       const std::vector<float>& payload) {
    std::string bytes = header + "\n";
    bytes.append(reinterpret_cast<const char*>(payload.data()), payload.size() * sizeof(float));
    const auto path = tmp.file(name);
    test::write_text_file(path, bytes);
    return path;
  };

  SUBCASE("wrong kind") {
    const auto path = write_raw(
        "mel.bin", R"({"shape":[2,3],"dtype":"f32","kind":"mel","rate_hz":50,"dim":3})",
        std::vector<float>(6, 0.0f));
    CHECK_THROWS_AS(avtk::import_embeddings(path), avtk::FormatError);
  }
  SUBCASE("wrong rank") {
    const auto path = write_raw(
        "r3.bin", R"({"shape":[1,2,3],"dtype":"f32","kind":"emb","rate_hz":50,"dim":3})",
        std::vector<float>(6, 0.0f));
    CHECK_THROWS_AS(avtk::import_embeddings(path), avtk::ContractError);
  }
  SUBCASE("missing rate_hz") {
    const auto path = write_raw("norate.bin", R"({"shape":[2,3],"dtype":"f32","kind":"emb","dim":3})",
                                std::vector<float>(6, 0.0f));
    CHECK_THROWS_AS(avtk::import_embeddings(path), avtk::FormatError);
  }
  SUBCASE("missing dim") {
    const auto path = write_raw(
        "nodim.bin", R"({"shape":[2,3],"dtype":"f32","kind":"emb","rate_hz":50})",
        std::vector<float>(6, 0.0f));
    CHECK_THROWS_AS(avtk::import_embeddings(path), avtk::FormatError);
  }
  SUBCASE("dim disagrees with shape") {
    const auto path = write_raw(
        "baddim.bin", R"({"shape":[2,3],"dtype":"f32","kind":"emb","rate_hz":50,"dim":4})",
        std::vector<float>(6, 0.0f));
    CHECK_THROWS_AS(avtk::import_embeddings(path), avtk::FormatError);
  }
  SUBCASE("non-finite payload") {
    std::vector<float> payload(6, 0.0f);
    payload[3] = std::numeric_limits<float>::quiet_NaN();
    const auto path = write_raw(
        "nan.bin", R"({"shape":[2,3],"dtype":"f32","kind":"emb","rate_hz":50,"dim":3})", payload);
    CHECK_THROWS_AS(avtk::import_embeddings(path), avtk::FormatError);
  }
}
