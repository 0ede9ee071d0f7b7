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

#include "avtk/audio.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <ostream>

#include "avtk/errors.hpp"
#include "avtk/tensor_file.hpp"

namespace avtk {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLogFloor = 1e-10;  // power floor before log10

// --------------------------------------------------------------------------
// WAV container
// --------------------------------------------------------------------------

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

float pcm16_to_float(const unsigned char* p) {
  std::int16_t v;
  std::uint16_t u = read_u16(p);
  std::memcpy(&v, &u, 2);
  return static_cast<float>(v) / 32768.0f;
}

float f32_from_le(const unsigned char* p) {
  std::uint32_t u = read_u32(p);
  float f;
  std::memcpy(&f, &u, 4);
  return f;
}

}  // namespace

AudioBuffer load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open WAV file: " + path);
  }

  unsigned char riff[12];
  in.read(reinterpret_cast<char*>(riff), 12);
  if (in.gcount() != 12 || std::memcmp(riff, "RIFF", 4) != 0 ||
      std::memcmp(riff + 8, "WAVE", 4) != 0) {
    throw FormatError("not a RIFF/WAVE file: " + path);
  }

  // Walk the chunk list; only "fmt " and "data" matter, everything else is
  // skipped (with the RIFF odd-size pad byte).
  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::vector<unsigned char> payload;

  unsigned char chunk_hdr[8];
  while (in.read(reinterpret_cast<char*>(chunk_hdr), 8)) {
    const std::uint32_t chunk_size = read_u32(chunk_hdr + 4);
    if (std::memcmp(chunk_hdr, "fmt ", 4) == 0) {
      if (chunk_size < 16) {
        throw FormatError("WAV fmt chunk too short");
      }
      std::vector<unsigned char> fmt(chunk_size);
      in.read(reinterpret_cast<char*>(fmt.data()), chunk_size);
      if (static_cast<std::uint32_t>(in.gcount()) != chunk_size) {
        throw FormatError("WAV fmt chunk truncated");
      }
      format = read_u16(fmt.data());
      channels = read_u16(fmt.data() + 2);
      rate = read_u32(fmt.data() + 4);
      bits = read_u16(fmt.data() + 14);
      // WAVE_FORMAT_EXTENSIBLE wraps the real code in the GUID prefix.
      if (format == 0xFFFE && chunk_size >= 40) {
        format = read_u16(fmt.data() + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk_hdr, "data", 4) == 0) {
      payload.resize(chunk_size);
      in.read(reinterpret_cast<char*>(payload.data()), chunk_size);
      if (static_cast<std::uint32_t>(in.gcount()) != chunk_size) {
        throw FormatError("WAV data chunk truncated");
      }
      break;  // fmt must precede data; nothing after data is needed
    } else {
      in.seekg(chunk_size, std::ios::cur);
    }
    if (chunk_size & 1) {
      in.seekg(1, std::ios::cur);  // RIFF pads odd chunks to even offsets
    }
  }

  if (!have_fmt) {
    throw FormatError("WAV file has no fmt chunk: " + path);
  }
  if (channels == 0 || rate == 0) {
    throw FormatError("WAV fmt chunk declares zero channels or rate");
  }
  const bool pcm16 = (format == 1 && bits == 16);
  const bool float32 = (format == 3 && bits == 32);
  if (!pcm16 && !float32) {
    throw UnsupportedError("unsupported WAV codec: format tag " + std::to_string(format) +
                           ", " + std::to_string(bits) + " bits (need PCM16 or float32)");
  }

  const std::size_t bytes_per_sample = pcm16 ? 2 : 4;
  const std::size_t frame_bytes = bytes_per_sample * channels;
  const std::size_t n_frames = payload.size() / frame_bytes;

  AudioBuffer out;
  out.sample_rate = static_cast<int>(rate);
  out.samples.resize(n_frames);
  const double inv_channels = 1.0 / channels;
  for (std::size_t f = 0; f < n_frames; ++f) {
    double acc = 0.0;
    const unsigned char* p = payload.data() + f * frame_bytes;
    for (std::uint16_t c = 0; c < channels; ++c, p += bytes_per_sample) {
      acc += pcm16 ? pcm16_to_float(p) : f32_from_le(p);
    }
    const double v = acc * inv_channels;
    if (!std::isfinite(v)) {
      throw FormatError("WAV file contains non-finite samples");
    }
    out.samples[f] = static_cast<float>(v);
  }
  return out;
}

// --------------------------------------------------------------------------
// Resampling
// --------------------------------------------------------------------------

AudioBuffer resample(const AudioBuffer& a, int target_rate) {
  if (target_rate <= 0) {
    throw ContractError("resample: target rate must be positive");
  }
  if (a.sample_rate <= 0) {
    throw ContractError("resample: source rate must be positive");
  }
  if (a.sample_rate == target_rate || a.samples.empty()) {
    AudioBuffer same = a;
    same.sample_rate = target_rate;
    return same;
  }

  const double ratio = static_cast<double>(target_rate) / a.sample_rate;
  const double fc = std::min(1.0, ratio);  // cutoff as fraction of source Nyquist
  constexpr int kLobes = 32;               // sinc zero crossings kept per side
  const int half_width = static_cast<int>(std::ceil(kLobes / fc));

  AudioBuffer out;
  out.sample_rate = target_rate;
  out.samples.resize(static_cast<std::size_t>(
      std::llround(static_cast<double>(a.samples.size()) * ratio)));

  const auto n = static_cast<long long>(a.samples.size());
  for (std::size_t j = 0; j < out.samples.size(); ++j) {
    const double center = static_cast<double>(j) / ratio;
    const long long lo = static_cast<long long>(std::ceil(center)) - half_width;
    const long long hi = static_cast<long long>(std::floor(center)) + half_width;
    double acc = 0.0, wsum = 0.0;
    for (long long i = lo; i <= hi; ++i) {
      const double x = center - static_cast<double>(i);
      const double sx = fc * x * kPi;
      const double sinc = std::abs(sx) < 1e-12 ? 1.0 : std::sin(sx) / sx;
      const double hann = 0.5 + 0.5 * std::cos(kPi * x / half_width);
      const double h = fc * sinc * hann;
      wsum += h;
      if (i >= 0 && i < n) {
        acc += h * a.samples[static_cast<std::size_t>(i)];
      }
    }
    // Normalizing by the kernel sum pins the passband gain to exactly 1.
    const double v = wsum != 0.0 ? acc / wsum : 0.0;
    out.samples[j] = static_cast<float>(std::clamp(v, -1.0, 1.0));
  }
  return out;
}

// --------------------------------------------------------------------------
// STFT
// --------------------------------------------------------------------------

namespace {

// Recursive radix-2 decimation with a naive DFT once the length turns odd.
// n_fft = 400 bottoms out at 25-point DFTs; double precision throughout.
void fft(const std::vector<std::complex<double>>& in, std::vector<std::complex<double>>& out) {
  const std::size_t n = in.size();
  out.resize(n);
  if (n == 1) {
    out[0] = in[0];
    return;
  }
  if (n % 2 == 1) {
    for (std::size_t k = 0; k < n; ++k) {
      std::complex<double> acc(0.0, 0.0);
      for (std::size_t t = 0; t < n; ++t) {
        const double ang = -2.0 * kPi * static_cast<double>(k * t % n) / static_cast<double>(n);
        acc += in[t] * std::complex<double>(std::cos(ang), std::sin(ang));
      }
      out[k] = acc;
    }
    return;
  }

  std::vector<std::complex<double>> even(n / 2), odd(n / 2);
  for (std::size_t i = 0; i < n / 2; ++i) {
    even[i] = in[2 * i];
    odd[i] = in[2 * i + 1];
  }
  std::vector<std::complex<double>> even_out, odd_out;
  fft(even, even_out);
  fft(odd, odd_out);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double ang = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
    const std::complex<double> tw(std::cos(ang), std::sin(ang));
    out[k] = even_out[k] + tw * odd_out[k];
    out[k + n / 2] = even_out[k] - tw * odd_out[k];
  }
}

// Reflection (no edge repeat) of an out-of-range sample index, the standard
// "reflect" pad mode. A one-sample signal reflects to itself.
std::size_t reflect_index(long long j, std::size_t n) {
  if (n == 1) {
    return 0;
  }
  const long long period = 2 * (static_cast<long long>(n) - 1);
  long long m = j % period;
  if (m < 0) {
    m += period;
  }
  if (m >= static_cast<long long>(n)) {
    m = period - m;
  }
  return static_cast<std::size_t>(m);
}

// Slaney mel scale: linear below 1 kHz, logarithmic above.
double hz_to_mel(double hz) {
  if (hz < 1000.0) {
    return hz * 3.0 / 200.0;
  }
  return 15.0 + 27.0 * std::log(hz / 1000.0) / std::log(6.4);
}

double mel_to_hz(double mel) {
  if (mel < 15.0) {
    return mel * 200.0 / 3.0;
  }
  return 1000.0 * std::exp(std::log(6.4) / 27.0 * (mel - 15.0));
}

}  // namespace

MelConfig MelConfig::for_rate(int sample_rate, double window_ms, double hop_ms, int n_mels,
                              double fmin, double fmax) {
  MelConfig cfg;
  cfg.sample_rate = sample_rate;
  cfg.window_ms = window_ms;
  cfg.hop_ms = hop_ms;
  cfg.n_fft = static_cast<int>(std::lround(window_ms / 1000.0 * sample_rate));
  cfg.hop = static_cast<int>(std::lround(hop_ms / 1000.0 * sample_rate));
  cfg.n_mels = n_mels;
  cfg.fmin = fmin;
  cfg.fmax = fmax < 0.0 ? sample_rate / 2.0 : fmax;
  cfg.validate();
  return cfg;
}

void MelConfig::validate() const {
  if (sample_rate <= 0) {
    throw ContractError("mel config: sample_rate must be positive");
  }
  if (n_fft != static_cast<int>(std::lround(window_ms / 1000.0 * sample_rate))) {
    throw ContractError("mel config: n_fft does not match window_ms at this rate");
  }
  if (hop != static_cast<int>(std::lround(hop_ms / 1000.0 * sample_rate))) {
    throw ContractError("mel config: hop does not match hop_ms at this rate");
  }
  if (n_fft <= 0 || hop <= 0) {
    throw ContractError("mel config: n_fft and hop must be positive");
  }
  if (n_mels < 1) {
    throw ContractError("mel config: n_mels must be >= 1");
  }
  if (!(fmin < fmax) || fmax > sample_rate / 2.0 + 1e-9) {
    throw ContractError("mel config: need fmin < fmax <= sample_rate/2");
  }
}

std::vector<double> mel_filterbank(const MelConfig& cfg) {
  cfg.validate();
  const int n_bins = cfg.n_fft / 2 + 1;
  const double bin_hz = static_cast<double>(cfg.sample_rate) / cfg.n_fft;

  // n_mels + 2 break frequencies, equally spaced on the mel axis.
  std::vector<double> edges(cfg.n_mels + 2);
  const double mel_lo = hz_to_mel(cfg.fmin);
  const double mel_hi = hz_to_mel(cfg.fmax);
  for (int k = 0; k < cfg.n_mels + 2; ++k) {
    edges[k] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * k / (cfg.n_mels + 1));
  }

  std::vector<double> fb(static_cast<std::size_t>(cfg.n_mels) * n_bins, 0.0);
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    double peak = 0.0;
    for (int i = 0; i < n_bins; ++i) {
      const double f = i * bin_hz;
      const double up = center > left ? (f - left) / (center - left) : 0.0;
      const double down = right > center ? (right - f) / (right - center) : 0.0;
      const double w = std::max(0.0, std::min(up, down));
      fb[static_cast<std::size_t>(m) * n_bins + i] = w;
      peak = std::max(peak, w);
    }
    if (peak <= 0.0) {
      throw ContractError("mel filterbank: filter " + std::to_string(m) +
                          " covers no FFT bin (n_mels too large for n_fft)");
    }
    for (int i = 0; i < n_bins; ++i) {
      fb[static_cast<std::size_t>(m) * n_bins + i] /= peak;
    }
  }
  return fb;
}

MelSpectrogram log_mel_spectrogram(const AudioBuffer& a, const MelConfig& cfg) {
  cfg.validate();
  if (a.sample_rate != cfg.sample_rate) {
    throw ContractError("log_mel_spectrogram: buffer is at " + std::to_string(a.sample_rate) +
                        " Hz but the config expects " + std::to_string(cfg.sample_rate) +
                        " Hz; resample first");
  }
  if (a.samples.empty()) {
    throw ContractError("log_mel_spectrogram: empty audio buffer");
  }

  const std::size_t n = a.samples.size();
  const std::size_t t_mel = (n + cfg.hop - 1) / cfg.hop;  // ceil(n / hop)
  const int n_bins = cfg.n_fft / 2 + 1;

  // Periodic Hann analysis window.
  std::vector<double> window(cfg.n_fft);
  for (int i = 0; i < cfg.n_fft; ++i) {
    window[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * i / cfg.n_fft));
  }

  const std::vector<double> fb = mel_filterbank(cfg);

  MelSpectrogram out;
  out.t_mel = t_mel;
  out.n_mels = cfg.n_mels;
  out.frame_rate_hz = static_cast<double>(cfg.sample_rate) / cfg.hop;
  out.config = cfg;
  out.frames.resize(t_mel * cfg.n_mels);

  std::vector<std::complex<double>> frame(cfg.n_fft);
  std::vector<std::complex<double>> spectrum;
  std::vector<double> power(n_bins);

  for (std::size_t t = 0; t < t_mel; ++t) {
    // Frame t is centered on sample t*hop; edges reflect.
    const long long start =
        static_cast<long long>(t) * cfg.hop - cfg.n_fft / 2;
    for (int i = 0; i < cfg.n_fft; ++i) {
      const std::size_t src = reflect_index(start + i, n);
      frame[i] = std::complex<double>(window[i] * a.samples[src], 0.0);
    }
    fft(frame, spectrum);
    for (int b = 0; b < n_bins; ++b) {
      power[b] = std::norm(spectrum[b]);
    }
    for (int m = 0; m < cfg.n_mels; ++m) {
      double e = 0.0;
      const double* row = fb.data() + static_cast<std::size_t>(m) * n_bins;
      for (int b = 0; b < n_bins; ++b) {
        e += row[b] * power[b];
      }
      out.at(t, m) = static_cast<float>(std::log10(std::max(e, kLogFloor)));
    }
  }
  return out;
}

MelSpectrogram normalize_log_mel(const MelSpectrogram& m) {
  if (m.frames.empty()) {
    throw ContractError("normalize_log_mel: empty spectrogram");
  }
  MelSpectrogram out = m;
  const float peak = *std::max_element(m.frames.begin(), m.frames.end());
  const float floor = peak - 8.0f;
  for (float& v : out.frames) {
    v = (std::max(v, floor) + 4.0f) / 4.0f;
  }
  return out;
}

void export_mel(const MelSpectrogram& m, std::ostream& out) {
  Tensor t;
  t.shape = {m.t_mel, static_cast<std::size_t>(m.n_mels)};
  t.data = m.frames;
  t.kind = "mel";
  write_tensor(t, out);
}

void export_mel(const MelSpectrogram& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot create mel tensor file: " + path);
  }
  export_mel(m, out);
}

}  // namespace avtk
