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

#include "avtk/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace avtk {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string num_to_string(double v) {
  return nlohmann::json(v).dump();
}

double round2(double v) {
  return std::round(v * 100.0) / 100.0;
}

// 53-bit uniform in [0, 1); <random> distributions are implementation-defined
// so the mapping is spelled out for reproducibility.
double next_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void fill_percentages(PipelineReport& report) {
  report.total_seconds = 0.0;
  for (const StageTiming& t : report.timings) {
    report.total_seconds += t.wall_seconds;
  }
  for (StageTiming& t : report.timings) {
    t.percent_of_total =
        report.total_seconds > 0.0 ? 100.0 * t.wall_seconds / report.total_seconds : 0.0;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Pipeline execution and replay
// ---------------------------------------------------------------------------

std::string PipelineReport::to_json() const {
  nlohmann::ordered_json j;
  j["stages"] = nlohmann::ordered_json::array();
  for (const StageTiming& t : timings) {
    nlohmann::ordered_json s;
    s["name"] = t.stage_name;
    s["seconds"] = t.wall_seconds;
    s["percent"] = round2(t.percent_of_total);
    j["stages"].push_back(std::move(s));
  }
  j["total_seconds"] = total_seconds;
  j["answer_tokens"] = answer_tokens;
  j["answer_duration_s"] = answer_duration_s;
  return j.dump();
}

std::string PipelineReport::to_csv() const {
  std::ostringstream out;
  out << "stage,seconds,percent\n";
  for (const StageTiming& t : timings) {
    out << t.stage_name << ',' << num_to_string(t.wall_seconds) << ','
        << num_to_string(round2(t.percent_of_total)) << '\n';
  }
  return out.str();
}

PipelineReport run_pipeline(const std::vector<Stage>& stages, StagePayload input) {
  if (stages.empty()) {
    throw ContractError("run_pipeline: need at least one stage");
  }
  std::set<std::string> names;
  for (const Stage& s : stages) {
    if (!names.insert(s.name).second) {
      throw ContractError("run_pipeline: duplicate stage name \"" + s.name + "\"");
    }
    if (!s.run) {
      throw ContractError("run_pipeline: stage \"" + s.name + "\" has no executor");
    }
  }

  PipelineReport report;
  StagePayload payload = std::move(input);
  for (const Stage& s : stages) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      payload = s.run(std::move(payload));
    } catch (const std::exception& e) {
      fill_percentages(report);
      throw PipelineError("stage \"" + s.name + "\" failed: " + e.what(), report);
    }
    const auto t1 = std::chrono::steady_clock::now();
    report.timings.push_back(
        {s.name, std::chrono::duration<double>(t1 - t0).count(), 0.0});
  }
  fill_percentages(report);
  report.answer_tokens = payload.answer_tokens;
  report.answer_duration_s = payload.answer_duration_s;
  return report;
}

PipelineReport replay_report(const std::vector<std::pair<std::string, double>>& durations,
                             int answer_tokens, double answer_duration_s) {
  if (durations.empty()) {
    throw ContractError("replay_report: no stage durations");
  }
  bool any_positive = false;
  for (const auto& [name, seconds] : durations) {
    if (seconds < 0.0) {
      throw ContractError("replay_report: stage \"" + name + "\" has negative duration");
    }
    any_positive = any_positive || seconds > 0.0;
  }
  if (!any_positive) {
    throw ContractError("replay_report: all stage durations are zero");
  }

  PipelineReport report;
  for (const auto& [name, seconds] : durations) {
    report.timings.push_back({name, seconds, 0.0});
  }
  fill_percentages(report);
  report.answer_tokens = answer_tokens;
  report.answer_duration_s = answer_duration_s;
  return report;
}

std::vector<std::pair<std::string, double>> read_stage_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open stage CSV: " + path);
  }
  std::vector<std::pair<std::string, double>> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw FormatError("stage CSV " + path + ": expected \"stage,seconds\" rows");
    }
    const std::string name = line.substr(0, comma);
    const std::string value = line.substr(comma + 1);
    char* end = nullptr;
    const double seconds = std::strtod(value.c_str(), &end);
    if (end != value.c_str() + value.size() || value.empty()) {
      if (first) {
        first = false;  // header row
        continue;
      }
      throw FormatError("stage CSV " + path + ": non-numeric duration \"" + value + "\"");
    }
    first = false;
    out.emplace_back(name, seconds);
  }
  if (out.empty()) {
    throw FormatError("stage CSV " + path + ": no data rows");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mock stages and profiles
// ---------------------------------------------------------------------------

namespace {

void sleep_seconds(double seconds) {
  if (seconds > 0.0) {
    std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
  }
}

}  // namespace

Stage make_fixed_stage(const std::string& name, double seconds, double time_scale) {
  if (seconds < 0.0 || time_scale < 0.0) {
    throw ContractError("mock stage: duration and time scale must be non-negative");
  }
  Stage s;
  s.name = name;
  s.kind = StageKind::mock_fixed;
  s.run = [seconds, time_scale](StagePayload p) {
    sleep_seconds(seconds * time_scale);
    return p;
  };
  return s;
}

Stage make_lognormal_stage(const std::string& name, double median_seconds, double sigma,
                           std::uint64_t seed, double time_scale) {
  if (median_seconds <= 0.0 || sigma < 0.0 || time_scale < 0.0) {
    throw ContractError("mock stage: median must be positive, sigma non-negative");
  }
  Stage s;
  s.name = name;
  s.kind = StageKind::mock_distribution;
  // The generator lives in the closure so successive pipeline runs walk the
  // same seeded latency sequence.
  auto rng = std::make_shared<std::mt19937_64>(seed);
  s.run = [median_seconds, sigma, time_scale, rng](StagePayload p) {
    const double u1 = (static_cast<double>((*rng)() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = next_unit(*rng);
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    sleep_seconds(std::exp(std::log(median_seconds) + sigma * z) * time_scale);
    return p;
  };
  return s;
}

const std::vector<TimingRow>& mock_profile(const std::string& name) {
  // Measured per-stage latencies of an interactive avatar pipeline, keyed by
  // the token count of the avatar's answer. Listening is omitted: it tracks
  // the user's speaking time, not system work.
  static const std::vector<TimingRow> table3 = {
      {1, 0.41, {{"STT", 0.06}, {"Language", 0.80}, {"TTS", 0.22}, {"AFE", 0.29},
                 {"FrameRendering", 4.05}, {"AudioOverlay", 0.14}}},
      {8, 1.69, {{"STT", 0.07}, {"Language", 0.96}, {"TTS", 0.33}, {"AFE", 0.28},
                 {"FrameRendering", 4.75}, {"AudioOverlay", 0.16}}},
      {14, 3.63, {{"STT", 0.07}, {"Language", 2.45}, {"TTS", 0.44}, {"AFE", 0.28},
                  {"FrameRendering", 5.45}, {"AudioOverlay", 0.14}}},
      {21, 5.08, {{"STT", 0.10}, {"Language", 2.27}, {"TTS", 0.44}, {"AFE", 0.28},
                  {"FrameRendering", 5.88}, {"AudioOverlay", 0.17}}},
      {30, 6.55, {{"STT", 0.06}, {"Language", 2.76}, {"TTS", 0.49}, {"AFE", 0.27},
                  {"FrameRendering", 6.58}, {"AudioOverlay", 0.15}}},
      {39, 9.55, {{"STT", 0.09}, {"Language", 1.95}, {"TTS", 0.78}, {"AFE", 0.28},
                  {"FrameRendering", 7.52}, {"AudioOverlay", 0.18}}},
      {50, 12.16, {{"STT", 0.07}, {"Language", 2.08}, {"TTS", 0.55}, {"AFE", 0.28},
                   {"FrameRendering", 8.65}, {"AudioOverlay", 0.18}}},
  };
  if (name == "table3") {
    return table3;
  }
  throw ContractError("unknown mock profile \"" + name + "\" (available: table3)");
}

std::vector<Stage> mock_pipeline_from_row(const TimingRow& row, bool lognormal,
                                          std::uint64_t seed, double sigma, double time_scale) {
  std::vector<Stage> stages;
  std::uint64_t stage_seed = seed;
  for (const auto& [name, seconds] : row.stage_seconds) {
    if (lognormal) {
      stages.push_back(make_lognormal_stage(name, seconds, sigma, stage_seed++, time_scale));
    } else {
      stages.push_back(make_fixed_stage(name, seconds, time_scale));
    }
  }
  // The final stage stamps the answer metadata onto the payload.
  if (!stages.empty()) {
    const int tokens = row.answer_tokens;
    const double duration = row.answer_duration_s;
    auto inner = stages.back().run;
    stages.back().run = [inner, tokens, duration](StagePayload p) {
      p = inner(std::move(p));
      p.answer_tokens = tokens;
      p.answer_duration_s = duration;
      return p;
    };
  }
  return stages;
}

// ---------------------------------------------------------------------------
// AFE benchmark
// ---------------------------------------------------------------------------

EncoderBackend reference_backend(std::uint64_t seed) {
  // Build the projection once; regenerating it per call would bill parameter
  // setup to every timing sample.
  auto params = std::make_shared<ReferenceEncoderParams>(ReferenceEncoderParams::from_seed(seed));
  return [params](const MelSpectrogram& m) { return encode_reference(m, *params); };
}

AudioBuffer synthetic_speech(double duration_s, int sample_rate, std::uint64_t seed) {
  if (duration_s <= 0.0 || sample_rate <= 0) {
    throw ContractError("synthetic_speech: duration and rate must be positive");
  }
  AudioBuffer a;
  a.sample_rate = sample_rate;
  a.samples.resize(static_cast<std::size_t>(std::llround(duration_s * sample_rate)));
  std::mt19937_64 rng(seed);
  for (float& s : a.samples) {
    s = static_cast<float>(next_unit(rng) - 0.5);  // white noise at half scale
  }
  return a;
}

std::string BenchCurve::to_csv() const {
  std::ostringstream out;
  out << "duration_s,mean_s,std_s,repeats\n";
  for (const BenchPoint& p : points) {
    out << num_to_string(p.duration_s) << ',' << num_to_string(p.mean_s) << ','
        << num_to_string(p.std_s) << ',' << p.repeats << '\n';
  }
  return out.str();
}

std::string BenchCurve::to_json() const {
  nlohmann::ordered_json j;
  j["points"] = nlohmann::ordered_json::array();
  for (const BenchPoint& p : points) {
    nlohmann::ordered_json e;
    e["duration_s"] = p.duration_s;
    e["mean_s"] = p.mean_s;
    e["std_s"] = p.std_s;
    e["repeats"] = p.repeats;
    e["aligned_shape"] = {p.n_frames, p.window, p.dim};
    j["points"].push_back(std::move(e));
  }
  return j.dump();
}

BenchCurve bench_afe(const EncoderBackend& backend, const std::vector<double>& durations_s,
                     int repeats, std::uint64_t seed, const MelConfig& mel_cfg,
                     const AlignConfig& align_cfg) {
  if (durations_s.empty()) {
    throw ContractError("bench_afe: no durations given");
  }
  for (std::size_t i = 1; i < durations_s.size(); ++i) {
    if (!(durations_s[i] > durations_s[i - 1])) {
      throw ContractError("bench_afe: durations must be strictly increasing");
    }
  }
  if (repeats < 1) {
    throw ContractError("bench_afe: repeats must be >= 1");
  }
  if (!backend) {
    throw ContractError("bench_afe: no encoder backend");
  }

  BenchCurve curve;
  for (double d : durations_s) {
    const AudioBuffer audio = synthetic_speech(d, mel_cfg.sample_rate, seed);

    BenchPoint point;
    point.duration_s = d;
    point.repeats = repeats;
    // One warm-up pass is discarded: first-touch allocations and cold caches
    // would otherwise bleed into the first sample.
    for (int r = 0; r < repeats + 1; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      const MelSpectrogram mel = normalize_log_mel(log_mel_spectrogram(audio, mel_cfg));
      const EmbeddingMatrix emb = backend(mel);
      const AlignedFeatureTensor aligned = align(emb, align_cfg);
      const auto t1 = std::chrono::steady_clock::now();
      if (r == 0) {
        point.n_frames = aligned.n_frames;
        point.window = aligned.window;
        point.dim = aligned.dim;
        continue;
      }
      point.samples.push_back(std::chrono::duration<double>(t1 - t0).count());
    }

    double mean = 0.0;
    for (double s : point.samples) {
      mean += s;
    }
    mean /= static_cast<double>(point.samples.size());
    double var = 0.0;
    for (double s : point.samples) {
      var += (s - mean) * (s - mean);
    }
    point.mean_s = mean;
    point.std_s = point.samples.size() > 1
                      ? std::sqrt(var / static_cast<double>(point.samples.size() - 1))
                      : 0.0;
    curve.points.push_back(std::move(point));
  }
  return curve;
}

// ---------------------------------------------------------------------------
// Dataset split
// ---------------------------------------------------------------------------

DatasetSplit split_dataset(std::size_t n_frames, double train_fraction) {
  if (n_frames < 2) {
    throw ContractError("split_dataset: need at least 2 frames, got " +
                        std::to_string(n_frames));
  }
  if (!(train_fraction > 0.0) || !(train_fraction < 1.0)) {
    throw ContractError("split_dataset: train fraction must lie in (0, 1)");
  }
  const auto cut = static_cast<std::size_t>(
      std::floor(train_fraction * static_cast<double>(n_frames)));
  DatasetSplit split;
  split.train = {0, cut};
  split.eval = {cut, n_frames};
  return split;
}

}  // namespace avtk
