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

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "avtk/aligner.hpp"
#include "avtk/audio.hpp"
#include "avtk/encoder.hpp"
#include "avtk/errors.hpp"
#include "avtk/harness.hpp"
#include "avtk/metrics.hpp"

namespace {

// Exit codes are part of the interface: 0 success, 2 I/O or usage,
// 3 contract/shape violations, 4 manifest inconsistencies.
constexpr int kExitIo = 2;
constexpr int kExitContract = 3;
constexpr int kExitManifest = 4;

std::string format_rate(double hz) {
  if (hz == static_cast<long long>(hz)) {
    return std::to_string(static_cast<long long>(hz));
  }
  return nlohmann::json(hz).dump();
}

void write_text(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) {
    throw avtk::IoError("cannot create output file: " + out_path);
  }
  out << text;
  if (!out) {
    throw avtk::IoError("write failed: " + out_path);
  }
}

std::vector<double> parse_double_list(const std::string& csv, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || end != item.c_str() + item.size()) {
      throw avtk::FormatError(std::string(flag) + ": \"" + item + "\" is not a number");
    }
    out.push_back(v);
  }
  if (out.empty()) {
    throw avtk::FormatError(std::string(flag) + ": empty list");
  }
  return out;
}

bool is_wav_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw avtk::IoError("cannot open input file: " + path);
  }
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  return in.gcount() == 4 && std::string(magic, 4) == "RIFF";
}

// ---------------------------------------------------------------------------
// Subcommand options
// ---------------------------------------------------------------------------

struct ExtractOpts {
  std::string audio_path;
  std::string out_path;
  int rate = 16000;
  double window_ms = 25.0;
  double hop_ms = 10.0;
  int n_mels = 80;
  double fmin = 0.0;
  double fmax = -1.0;  // -1 = rate / 2
};

struct AlignOpts {
  std::string input_path;
  std::string out_path;
  int w = 16, s = 2, p = 7;
  double fps = 25.0;
  int rate = 16000;
  std::uint64_t seed = 0;
  bool allow_rate_override = false;
};

struct EvalOpts {
  std::string pred_dir, truth_dir;
  std::string manifest_path;
  std::string metrics_csv;
  std::string format = "json";
  std::string out_path = "-";
  bool series = false;
};

struct BenchOpts {
  std::string mode;
  std::string durations_csv = "1,2,4,8,16,30";
  int repeats = 5;
  std::uint64_t seed = 0;
  std::string mock = "table3";
  int tokens = 1;
  bool lognormal = false;
  double sigma = 0.25;
  double time_scale = 1.0;
  std::string replay_csv;
  std::string format = "json";
  std::string out_path = "-";
};

struct SplitOpts {
  std::uint64_t n = 0;
  double fraction = 0.91;
};

avtk::MelSpectrogram extract_mel(const std::string& path, const ExtractOpts& o) {
  const avtk::AudioBuffer raw = avtk::load_wav(path);
  const avtk::AudioBuffer audio = avtk::resample(raw, o.rate);
  const avtk::MelConfig cfg =
      avtk::MelConfig::for_rate(o.rate, o.window_ms, o.hop_ms, o.n_mels, o.fmin, o.fmax);
  return avtk::normalize_log_mel(avtk::log_mel_spectrogram(audio, cfg));
}

int run_extract(const ExtractOpts& o) {
  const avtk::MelSpectrogram mel = extract_mel(o.audio_path, o);

  // With tensor bytes going to standard output, the shape line moves to
  // standard error so the payload stays parseable.
  const bool to_stdout = o.out_path == "-";
  std::ostream& info = to_stdout ? std::cerr : std::cout;
  info << "mel shape " << mel.t_mel << 'x' << mel.n_mels << " @"
       << format_rate(mel.frame_rate_hz) << "Hz\n";

  if (to_stdout) {
    avtk::export_mel(mel, std::cout);
  } else if (!o.out_path.empty()) {
    avtk::export_mel(mel, o.out_path);
  }
  return 0;
}

int run_align(const AlignOpts& o) {
  avtk::EmbeddingMatrix emb;
  if (is_wav_file(o.input_path)) {
    ExtractOpts mel_opts;
    mel_opts.rate = o.rate;
    const avtk::MelSpectrogram mel = extract_mel(o.input_path, mel_opts);
    emb = avtk::encode_reference(mel, avtk::ReferenceEncoderParams::from_seed(o.seed));
  } else {
    emb = avtk::import_embeddings(o.input_path);
  }

  avtk::AlignConfig cfg;
  cfg.window = o.w;
  cfg.stride = o.s;
  cfg.padding = o.p;
  cfg.video_fps = o.fps;
  const avtk::AlignedFeatureTensor aligned = avtk::align(emb, cfg, o.allow_rate_override);

  const bool to_stdout = o.out_path == "-";
  std::ostream& info = to_stdout ? std::cerr : std::cout;
  info << "aligned shape " << aligned.n_frames << 'x' << aligned.window << 'x' << aligned.dim
       << '\n';

  if (to_stdout) {
    avtk::export_aligned(aligned, std::cout);
  } else if (!o.out_path.empty()) {
    avtk::export_aligned(aligned, o.out_path);
  }
  return 0;
}

int run_eval(const EvalOpts& o) {
  avtk::EvalManifest manifest;
  if (!o.manifest_path.empty()) {
    manifest = avtk::EvalManifest::from_json_file(o.manifest_path);
  }
  std::set<std::string> metrics;
  if (!o.metrics_csv.empty()) {
    std::stringstream ss(o.metrics_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) {
        metrics.insert(item);
      }
    }
  }
  const avtk::QualityReport report =
      avtk::evaluate_suite(o.pred_dir, o.truth_dir, manifest, metrics);
  write_text(o.out_path,
             o.format == "csv" ? report.to_csv() : report.to_json(o.series) + "\n");
  return 0;
}

int run_bench(const BenchOpts& o) {
  if (o.mode == "afe") {
    const std::vector<double> durations = parse_double_list(o.durations_csv, "--durations");
    const avtk::BenchCurve curve =
        avtk::bench_afe(avtk::reference_backend(o.seed), durations, o.repeats, o.seed);
    write_text(o.out_path, o.format == "csv" ? curve.to_csv() : curve.to_json() + "\n");
    return 0;
  }

  const auto find_row = [&o]() -> const avtk::TimingRow& {
    for (const avtk::TimingRow& row : avtk::mock_profile(o.mock)) {
      if (row.answer_tokens == o.tokens) {
        return row;
      }
    }
    std::string available;
    for (const avtk::TimingRow& row : avtk::mock_profile(o.mock)) {
      available += (available.empty() ? "" : ", ") + std::to_string(row.answer_tokens);
    }
    throw avtk::ContractError("profile \"" + o.mock + "\" has no row with " +
                              std::to_string(o.tokens) + " tokens (available: " + available +
                              ")");
  };

  avtk::PipelineReport report;
  if (o.mode == "pipeline") {
    const avtk::TimingRow& row = find_row();
    const std::vector<avtk::Stage> stages =
        avtk::mock_pipeline_from_row(row, o.lognormal, o.seed, o.sigma, o.time_scale);
    report = avtk::run_pipeline(stages, avtk::StagePayload{});
  } else {  // replay
    if (!o.replay_csv.empty()) {
      report = avtk::replay_report(avtk::read_stage_csv(o.replay_csv));
    } else {
      const avtk::TimingRow& row = find_row();
      report = avtk::replay_report(row.stage_seconds, row.answer_tokens, row.answer_duration_s);
    }
  }
  write_text(o.out_path, o.format == "csv" ? report.to_csv() : report.to_json() + "\n");
  return 0;
}

int run_split(const SplitOpts& o) {
  const avtk::DatasetSplit split = avtk::split_dataset(o.n, o.fraction);
  nlohmann::ordered_json j;
  j["train"] = {split.train.begin, split.train.end};
  j["eval"] = {split.eval.begin, split.eval.end};
  std::cout << j.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Audio feature extraction, alignment, metric and latency toolkit"};
  app.require_subcommand(1);

  ExtractOpts extract;
  CLI::App* cmd_extract =
      app.add_subcommand("extract", "Compute a normalized log-mel spectrogram from a WAV file");
  cmd_extract->add_option("audio", extract.audio_path, "input WAV file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_extract->add_option("--out", extract.out_path, "tensor output path, or - for stdout");
  cmd_extract->add_option("--rate", extract.rate, "processing sample rate in Hz")
      ->capture_default_str();
  cmd_extract->add_option("--window-ms", extract.window_ms, "analysis window in milliseconds")
      ->capture_default_str();
  cmd_extract->add_option("--hop-ms", extract.hop_ms, "hop in milliseconds")
      ->capture_default_str();
  cmd_extract->add_option("--mels", extract.n_mels, "number of mel bands")
      ->capture_default_str();
  cmd_extract->add_option("--fmin", extract.fmin, "lowest filter frequency in Hz")
      ->capture_default_str();
  cmd_extract->add_option("--fmax", extract.fmax, "highest filter frequency in Hz (default rate/2)");

  AlignOpts align;
  CLI::App* cmd_align = app.add_subcommand(
      "align", "Window encoder features per video frame (WAV or embedding tensor input)");
  cmd_align->add_option("input", align.input_path, "WAV file or embedding tensor")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_align->add_option("--out", align.out_path, "tensor output path, or - for stdout");
  cmd_align->add_option("--w", align.w, "window length in encoder frames")->capture_default_str();
  cmd_align->add_option("--s", align.s, "stride in encoder frames")->capture_default_str();
  cmd_align->add_option("--p", align.p, "symmetric zero padding")->capture_default_str();
  cmd_align->add_option("--fps", align.fps, "video frame rate")->capture_default_str();
  cmd_align->add_option("--rate", align.rate, "processing sample rate for WAV input")
      ->capture_default_str();
  cmd_align->add_option("--seed", align.seed, "reference encoder seed")
      ->envname("AVTK_SEED")
      ->capture_default_str();
  cmd_align->add_flag("--allow-rate-override", align.allow_rate_override,
                      "recompute the stride when the encoder rate does not match stride x fps");

  EvalOpts eval;
  CLI::App* cmd_eval =
      app.add_subcommand("eval", "Run the quality metric suite over paired frame directories");
  cmd_eval->add_option("pred", eval.pred_dir, "generated frames directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  cmd_eval->add_option("truth", eval.truth_dir, "ground-truth frames directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  cmd_eval->add_option("--manifest", eval.manifest_path, "JSON manifest with side files")
      ->check(CLI::ExistingFile);
  cmd_eval->add_option("--metrics", eval.metrics_csv,
                       "comma list from psnr,ssim,lpips,lmd,fid,aue,sync (default: all available)");
  cmd_eval->add_option("--format", eval.format, "output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  cmd_eval->add_flag("--series", eval.series, "include per-frame arrays in the JSON report");
  cmd_eval->add_option("--out", eval.out_path, "report path, or - for stdout")
      ->capture_default_str();

  BenchOpts bench;
  CLI::App* cmd_bench =
      app.add_subcommand("bench", "Feature-chain benchmarks and pipeline timing reports");
  cmd_bench->add_option("mode", bench.mode, "afe, pipeline or replay")
      ->required()
      ->check(CLI::IsMember({"afe", "pipeline", "replay"}));
  cmd_bench->add_option("--durations", bench.durations_csv, "afe: audio durations in seconds")
      ->capture_default_str();
  cmd_bench->add_option("--repeats", bench.repeats, "afe: timed repeats after one warm-up")
      ->capture_default_str();
  cmd_bench->add_option("--seed", bench.seed, "seed for synthetic audio / latency draws")
      ->envname("AVTK_SEED")
      ->capture_default_str();
  cmd_bench->add_option("--mock", bench.mock, "pipeline/replay: timing profile name")
      ->capture_default_str();
  cmd_bench->add_option("--tokens", bench.tokens, "pipeline/replay: profile row by answer tokens")
      ->capture_default_str();
  cmd_bench->add_flag("--lognormal", bench.lognormal,
                      "pipeline: draw stage latencies from a seeded log-normal");
  cmd_bench->add_option("--sigma", bench.sigma, "pipeline: log-normal sigma")
      ->capture_default_str();
  cmd_bench->add_option("--time-scale", bench.time_scale, "pipeline: scale mock sleeps")
      ->capture_default_str();
  cmd_bench->add_option("--csv", bench.replay_csv, "replay: stage,seconds CSV to recompute")
      ->check(CLI::ExistingFile);
  cmd_bench->add_option("--format", bench.format, "output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  cmd_bench->add_option("--out", bench.out_path, "output path, or - for stdout")
      ->capture_default_str();

  SplitOpts split;
  CLI::App* cmd_split =
      app.add_subcommand("split", "Contiguous train/eval frame ranges (train fraction first)");
  cmd_split->add_option("n", split.n, "total frame count")
      ->required()
      ->check(CLI::Range(std::uint64_t{2}, std::numeric_limits<std::uint64_t>::max()));
  cmd_split->add_option("--fraction", split.fraction, "train fraction in (0, 1)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
    if (app.got_subcommand(cmd_extract)) {
      return run_extract(extract);
    }
    if (app.got_subcommand(cmd_align)) {
      return run_align(align);
    }
    if (app.got_subcommand(cmd_eval)) {
      return run_eval(eval);
    }
    if (app.got_subcommand(cmd_bench)) {
      return run_bench(bench);
    }
    if (app.got_subcommand(cmd_split)) {
      return run_split(split);
    }
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the usage message
    return kExitIo;
  } catch (const avtk::ManifestError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitManifest;
  } catch (const avtk::ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitContract;
  } catch (const avtk::FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const avtk::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
