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

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace test {

/// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("avtk-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  std::string dir(const std::string& name) const {
    const auto d = path_ / name;
    std::filesystem::create_directories(d);
    return d.string();
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_bytes(const std::string& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// --------------------------------------------------------------------------
// WAV byte writers (independent of the production reader)
// --------------------------------------------------------------------------

inline void push_u16(std::vector<unsigned char>& b, std::uint16_t v) {
  b.push_back(static_cast<unsigned char>(v & 0xff));
  b.push_back(static_cast<unsigned char>(v >> 8));
}

inline void push_u32(std::vector<unsigned char>& b, std::uint32_t v) {
  b.push_back(static_cast<unsigned char>(v & 0xff));
  b.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
  b.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
  b.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

inline void push_tag(std::vector<unsigned char>& b, const char* tag) {
  b.insert(b.end(), tag, tag + 4);
}

/// channels[c][i]: sample i of channel c (equal lengths). format 1 = PCM16.
inline std::vector<unsigned char> wav_pcm16_bytes(
    const std::vector<std::vector<std::int16_t>>& channels, std::uint32_t rate) {
  const auto n_ch = static_cast<std::uint16_t>(channels.size());
  const std::uint32_t n = channels.empty() ? 0 : static_cast<std::uint32_t>(channels[0].size());
  const std::uint32_t data_size = n * n_ch * 2;

  std::vector<unsigned char> b;
  push_tag(b, "RIFF");
  push_u32(b, 36 + data_size);
  push_tag(b, "WAVE");
  push_tag(b, "fmt ");
  push_u32(b, 16);
  push_u16(b, 1);  // PCM
  push_u16(b, n_ch);
  push_u32(b, rate);
  push_u32(b, rate * n_ch * 2);
  push_u16(b, static_cast<std::uint16_t>(n_ch * 2));
  push_u16(b, 16);
  push_tag(b, "data");
  push_u32(b, data_size);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint16_t c = 0; c < n_ch; ++c) {
      push_u16(b, static_cast<std::uint16_t>(channels[c][i]));
    }
  }
  return b;
}

inline std::vector<unsigned char> wav_float32_bytes(
    const std::vector<std::vector<float>>& channels, std::uint32_t rate) {
  const auto n_ch = static_cast<std::uint16_t>(channels.size());
  const std::uint32_t n = channels.empty() ? 0 : static_cast<std::uint32_t>(channels[0].size());
  const std::uint32_t data_size = n * n_ch * 4;

  std::vector<unsigned char> b;
  push_tag(b, "RIFF");
  push_u32(b, 36 + data_size);
  push_tag(b, "WAVE");
  push_tag(b, "fmt ");
  push_u32(b, 16);
  push_u16(b, 3);  // IEEE float
  push_u16(b, n_ch);
  push_u32(b, rate);
  push_u32(b, rate * n_ch * 4);
  push_u16(b, static_cast<std::uint16_t>(n_ch * 4));
  push_u16(b, 32);
  push_tag(b, "data");
  push_u32(b, data_size);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint16_t c = 0; c < n_ch; ++c) {
      std::uint32_t u;
      std::memcpy(&u, &channels[c][i], 4);
      push_u32(b, u);
    }
  }
  return b;
}

inline void write_wav_pcm16(const std::string& path,
                            const std::vector<std::vector<std::int16_t>>& channels,
                            std::uint32_t rate) {
  write_bytes(path, wav_pcm16_bytes(channels, rate));
}

inline void write_wav_float32(const std::string& path,
                              const std::vector<std::vector<float>>& channels,
                              std::uint32_t rate) {
  write_bytes(path, wav_float32_bytes(channels, rate));
}

inline std::vector<float> make_tone(double freq_hz, double duration_s, int rate,
                                    double amplitude = 0.5) {
  std::vector<float> s(static_cast<std::size_t>(std::llround(duration_s * rate)));
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = static_cast<float>(
        amplitude * std::sin(2.0 * 3.14159265358979323846 * freq_hz * i / rate));
  }
  return s;
}

/// Small deterministic RNG wrapper for test data.
struct Rng {
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  std::mt19937_64 gen;

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
  }
  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
  double gaussian(double mean = 0.0, double sigma = 1.0) {
    return std::normal_distribution<double>(mean, sigma)(gen);
  }
};

}  // namespace test
