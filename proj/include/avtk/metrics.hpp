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

#include <array>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "avtk/image.hpp"

namespace avtk {

// ---------------------------------------------------------------------------
// Inputs
// ---------------------------------------------------------------------------

struct LandmarkSet {
  std::vector<std::array<double, 2>> points;  // (x, y) pixel coordinates
};

/// Facial action-unit intensities keyed by AU id.
struct AUVector {
  std::map<int, double> intensities;
};

/// Lower-face action units used by default for the AU error.
extern const std::vector<int> kLowerFaceAUs;  // {10,12,14,15,17,20,23,25,26}

/// Gaussian moments of an image feature distribution. Covariance is the
/// sample (n-1) estimator when built from vectors.
struct FeatureSet {
  std::vector<double> mean;  // d
  std::vector<double> cov;   // (d, d) row-major, symmetric PSD
  int dim = 0;
  std::size_t n_samples = 0;

  /// rows is (n, d) row-major; requires n >= 2.
  static FeatureSet from_samples(const std::vector<double>& rows, std::size_t n, int d);
  /// Direct moments; cov must be symmetric to 1e-8 * ||cov||.
  static FeatureSet from_moments(std::vector<double> mean, std::vector<double> cov);
};

/// Paired per-frame video/audio embeddings, both (count, dim) row-major.
struct EmbeddingPairSeries {
  std::vector<double> video;
  std::vector<double> audio;
  std::size_t count = 0;
  int dim = 0;
  double eps = 1e-8;  // stability floor for the cosine denominator
};

struct SSIMConfig {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
};

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// 10 * log10(MAX^2 / MSE) over all pixels and channels.
/// Identical frames have zero MSE and return +infinity.
double psnr(const ImageFrame& a, const ImageFrame& b);

/// Mean of the local SSIM map: 11x11 Gaussian window (sigma 1.5), valid-mode,
/// C1 = (k1*L)^2, C2 = (k2*L)^2 with L = max_value. RGB is converted to luma
/// first. Images smaller than the window are a contract error.
double ssim(const ImageFrame& a, const ImageFrame& b, const SSIMConfig& cfg = {});

/// Maps a frame to per-patch feature vectors; both frames of a pair must
/// produce the same number of patches.
using PatchEmbedder = std::function<std::vector<std::vector<double>>(const ImageFrame&)>;

/// Default embedder: grid x grid patches over the luma plane, each summarized
/// as (mean, population std, mean horizontal gradient, mean vertical
/// gradient). A stand-in for learned features; externally computed per-patch
/// features can be fed through lpips_from_features instead.
PatchEmbedder grid_stat_embedder(int grid = 8);

/// Mean over patches of the L2 distance between patch features.
double lpips(const ImageFrame& a, const ImageFrame& b, const PatchEmbedder& embedder);
double lpips_from_features(const std::vector<std::vector<double>>& fa,
                           const std::vector<std::vector<double>>& fb);

/// Mean Euclidean distance between corresponding landmarks.
double lmd(const LandmarkSet& a, const LandmarkSet& b);

/// Square root of a symmetric PSD matrix (d x d row-major) via
/// eigendecomposition. Eigenvalues below -1e-8 * ||m|| are a contract error;
/// small negatives are clamped to zero.
std::vector<double> sqrtm_psd(const std::vector<double>& m, int d);

/// Frechet distance between feature Gaussians:
/// ||mu_r - mu_g||^2 + Tr(S_r + S_g - 2 sqrtm(S_r S_g)), with the matrix root
/// taken through the symmetrized product S_g^1/2 S_r S_g^1/2. Tiny negative
/// totals are clamped to zero.
double fid(const FeatureSet& real, const FeatureSet& gen);

/// Mean squared action-unit intensity difference over the configured subset.
/// Both vectors must define every AU in the subset.
double aue_lower(const AUVector& a, const AUVector& b,
                 const std::vector<int>& subset = kLowerFaceAUs);

/// Mean over pairs of v.s / max(||v|| ||s||, eps), each term clamped to
/// [-1, 1].
double sync_conf(const EmbeddingPairSeries& series);

// ---------------------------------------------------------------------------
// Suite evaluation
// ---------------------------------------------------------------------------

/// Optional side data for evaluate_suite, parsed from a JSON manifest:
///   {"frames": ["f0.pgm", ...],                       // optional explicit list
///    "landmarks": {"pred": csv, "truth": csv},        // frame_index,point_index,x,y
///    "aus": {"pred": csv, "truth": csv},              // frame_index,au_id,intensity
///    "au_subset": [10, 12, ...],
///    "sync": {"video": tensor, "audio": tensor},      // (N, d) pairs
///    "fid_features": {"pred": tensor, "truth": tensor},    // (n, d)
///    "lpips_features": {"pred": tensor, "truth": tensor}}  // (n_frames, N, d)
/// Relative paths resolve against the manifest's directory.
struct EvalManifest {
  std::vector<std::string> frames;  // empty = scan directories
  std::string landmarks_pred, landmarks_truth;
  std::string aus_pred, aus_truth;
  std::vector<int> au_subset = kLowerFaceAUs;
  std::string sync_video, sync_audio;
  std::string fid_pred, fid_truth;
  std::string lpips_pred, lpips_truth;

  static EvalManifest from_json_file(const std::string& path);
};

/// Aggregated metric means plus optional per-frame series. Means preserve
/// IEEE infinities (identical corpora yield an infinite PSNR).
struct QualityReport {
  std::vector<std::pair<std::string, double>> means;        // insertion-ordered
  std::map<std::string, std::vector<double>> per_frame;     // frame-wise series
  std::size_t n_frames = 0;

  bool has(const std::string& metric) const;
  double mean_of(const std::string& metric) const;

  std::string to_json(bool include_series = false) const;
  std::string to_csv() const;  // one row per frame
};

/// Compute the metric suite over paired frame directories. `metrics` selects a
/// subset of {psnr, ssim, lpips, lmd, fid, aue, sync}; empty means every
/// metric the inputs support. lmd/aue/sync require the corresponding manifest
/// entries; fid falls back to grid-stat frame features when no feature files
/// are given. Frame-count mismatches and missing side files raise
/// ManifestError.
QualityReport evaluate_suite(const std::string& pred_dir, const std::string& truth_dir,
                             const EvalManifest& manifest = {},
                             const std::set<std::string>& metrics = {});

}  // namespace avtk
