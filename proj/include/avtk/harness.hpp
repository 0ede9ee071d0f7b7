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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "avtk/aligner.hpp"
#include "avtk/audio.hpp"
#include "avtk/encoder.hpp"
#include "avtk/errors.hpp"

namespace avtk {

// ---------------------------------------------------------------------------
// Stage graph
// ---------------------------------------------------------------------------

/// Data threaded through the pipeline. Stages read what they need and fill in
/// what they produce; mock stages pass it through untouched.
struct StagePayload {
  AudioBuffer audio;
  std::string text;
  int answer_tokens = 0;
  double answer_duration_s = 0.0;
  std::shared_ptr<AlignedFeatureTensor> features;
};

enum class StageKind { real, mock_fixed, mock_distribution, replay };

struct Stage {
  std::string name;
  StageKind kind = StageKind::real;
  std::function<StagePayload(StagePayload)> run;
};

struct StageTiming {
  std::string stage_name;
  double wall_seconds = 0.0;
  double percent_of_total = 0.0;  // unrounded; rounded only at serialization
};

struct PipelineReport {
  std::vector<StageTiming> timings;  // execution order
  double total_seconds = 0.0;
  int answer_tokens = 0;
  double answer_duration_s = 0.0;

  std::string to_json() const;
  std::string to_csv() const;  // one stage per row: stage,seconds,percent
};

/// A stage failed mid-pipeline; carries the report for the stages that ran.
class PipelineError : public Error {
 public:
  PipelineError(const std::string& msg, PipelineReport partial)
      : Error(msg), partial(std::move(partial)) {}
  PipelineReport partial;
};

/// Execute stages sequentially, timing each with a monotonic clock and
/// threading the payload through. Percentages are computed from the sum.
PipelineReport run_pipeline(const std::vector<Stage>& stages, StagePayload input);

/// Recompute a report from recorded durations without executing anything.
/// Durations must be non-negative with at least one positive entry.
PipelineReport replay_report(const std::vector<std::pair<std::string, double>>& durations,
                             int answer_tokens = 0, double answer_duration_s = 0.0);

/// Parse a `stage,seconds` CSV (optional header line) for replay_report.
std::vector<std::pair<std::string, double>> read_stage_csv(const std::string& path);

// ---------------------------------------------------------------------------
// Mock stages and canned timing profiles
// ---------------------------------------------------------------------------

/// Stage that sleeps for a fixed duration and passes the payload through.
Stage make_fixed_stage(const std::string& name, double seconds, double time_scale = 1.0);

/// Stage with seeded log-normal latency: exp(N(ln median, sigma)).
/// Each invocation draws the next latency from the stage's own generator.
Stage make_lognormal_stage(const std::string& name, double median_seconds, double sigma,
                           std::uint64_t seed, double time_scale = 1.0);

/// One row of a canned per-stage timing profile.
struct TimingRow {
  int answer_tokens = 0;
  double answer_duration_s = 0.0;
  std::vector<std::pair<std::string, double>> stage_seconds;
};

/// Bundled latency profile for an interactive avatar pipeline
/// (STT, Language, TTS, AFE, FrameRendering, AudioOverlay), keyed by answer
/// length. Profile "table3" has seven rows from 1 to 50 answer tokens.
const std::vector<TimingRow>& mock_profile(const std::string& name);

/// Build a mock pipeline from a profile row. With lognormal = true each stage
/// gets seeded log-normal latency around the row's magnitudes; otherwise the
/// stages sleep for the fixed row durations. Listening is excluded: its
/// duration tracks the user, not the system.
std::vector<Stage> mock_pipeline_from_row(const TimingRow& row, bool lognormal = false,
                                          std::uint64_t seed = 0, double sigma = 0.25,
                                          double time_scale = 1.0);

// ---------------------------------------------------------------------------
// AFE benchmarking
// ---------------------------------------------------------------------------

using EncoderBackend = std::function<EmbeddingMatrix(const MelSpectrogram&)>;

EncoderBackend reference_backend(std::uint64_t seed);

/// Deterministic seeded white noise at half amplitude; same (duration, rate,
/// seed) always yields the same samples.
AudioBuffer synthetic_speech(double duration_s, int sample_rate, std::uint64_t seed);

struct BenchPoint {
  double duration_s = 0.0;
  double mean_s = 0.0;
  double std_s = 0.0;
  int repeats = 0;
  std::vector<double> samples;  // per-repeat wall times, warm-up excluded
  // aligned output shape observed at this point
  std::size_t n_frames = 0;
  int window = 0;
  int dim = 0;
};

struct BenchCurve {
  std::vector<BenchPoint> points;  // durations strictly increasing

  std::string to_csv() const;  // duration_s,mean_s,std_s,repeats
  std::string to_json() const;
};

/// Time the feature chain (mel -> normalize -> encode -> align) end-to-end on
/// seeded synthetic audio for each duration. One warm-up run per point is
/// discarded; mean and standard deviation are over the remaining repeats.
BenchCurve bench_afe(const EncoderBackend& backend, const std::vector<double>& durations_s,
                     int repeats = 5, std::uint64_t seed = 0,
                     const MelConfig& mel_cfg = {}, const AlignConfig& align_cfg = {});

// ---------------------------------------------------------------------------
// Dataset split
// ---------------------------------------------------------------------------

struct SplitRange {
  std::size_t begin = 0;
  std::size_t end = 0;  // half-open [begin, end)
  std::size_t size() const { return end - begin; }
};

struct DatasetSplit {
  SplitRange train;
  SplitRange eval;
};

/// Contiguous head/tail split: train = [0, floor(fraction * n)),
/// eval = [floor(fraction * n), n). Requires n >= 2 and 0 < fraction < 1.
DatasetSplit split_dataset(std::size_t n_frames, double train_fraction = 0.91);

}  // namespace avtk
