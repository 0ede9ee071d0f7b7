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
#include <string>
#include <vector>

namespace avtk {

/// Mono PCM audio. Samples are amplitudes in [-1, 1].
struct AudioBuffer {
  std::vector<float> samples;
  int sample_rate = 0;  // Hz, > 0

  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

/// STFT / mel filterbank parameters. Defaults follow the 16 kHz speech
/// front-end convention: 25 ms Hann windows, 10 ms hop, 80 mel bands over
/// 0..8 kHz, center-padded analysis.
struct MelConfig {
  int sample_rate = 16000;
  double window_ms = 25.0;
  double hop_ms = 10.0;
  int n_fft = 400;  // == round(window_ms/1000 * sample_rate)
  int hop = 160;    // == round(hop_ms/1000 * sample_rate)
  int n_mels = 80;
  double fmin = 0.0;
  double fmax = 8000.0;  // <= sample_rate / 2

  /// Derive n_fft/hop from the millisecond fields for a given rate.
  static MelConfig for_rate(int sample_rate, double window_ms = 25.0, double hop_ms = 10.0,
                            int n_mels = 80, double fmin = 0.0, double fmax = -1.0);

  /// Throws ContractError if any field invariant is broken.
  void validate() const;
};

/// Log-mel spectrogram, time-major: frames[t * n_mels + m].
struct MelSpectrogram {
  std::vector<float> frames;  // (t_mel, n_mels) row-major float32
  std::size_t t_mel = 0;
  int n_mels = 0;
  double frame_rate_hz = 0.0;  // sample_rate / hop, 100 at defaults
  MelConfig config;

  float at(std::size_t t, int m) const { return frames[t * static_cast<std::size_t>(n_mels) + m]; }
  float& at(std::size_t t, int m) { return frames[t * static_cast<std::size_t>(n_mels) + m]; }
};

/// Read a RIFF/WAVE file. Accepts 16-bit PCM and 32-bit IEEE float, any
/// channel count; channels are mean-downmixed to mono and 16-bit samples are
/// scaled by 1/32768.
///
/// Throws IoError (unreadable), FormatError (malformed container) or
/// UnsupportedError (other codecs / bit depths).
AudioBuffer load_wav(const std::string& path);

/// Band-limited resampling with a Hann-windowed sinc kernel. Output length is
/// round(n * target_rate / sample_rate), so the duration is preserved to
/// within one sample period. Same-rate input is returned unchanged.
AudioBuffer resample(const AudioBuffer& a, int target_rate);

/// Triangular mel filterbank on the Slaney mel scale, (n_mels, n_fft/2 + 1)
/// row-major. Each row is rescaled so its peak over the FFT bins is exactly 1.
std::vector<double> mel_filterbank(const MelConfig& cfg);

/// Center-padded STFT (reflection at the edges), power spectrum, mel
/// filterbank, then log10 with a 1e-10 floor. Produces ceil(n_samples / hop)
/// frames; silence maps to a uniform -10.
///
/// The buffer must already be at cfg.sample_rate (ContractError otherwise).
MelSpectrogram log_mel_spectrogram(const AudioBuffer& a, const MelConfig& cfg);

/// Dynamic-range normalization: x <- max(x, max(x) - 8), then (x + 4) / 4.
MelSpectrogram normalize_log_mel(const MelSpectrogram& m);

/// Write a spectrogram as a tensor interchange file of kind "mel".
void export_mel(const MelSpectrogram& m, const std::string& path);
void export_mel(const MelSpectrogram& m, std::ostream& out);

}  // namespace avtk
