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

#include "avtk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

#include "avtk/errors.hpp"
#include "avtk/tensor_file.hpp"

namespace avtk {

namespace fs = std::filesystem;

const std::vector<int> kLowerFaceAUs = {10, 12, 14, 15, 17, 20, 23, 25, 26};

namespace {

// Shortest round-trip decimal form; IEEE infinities spell out as "inf"
// because JSON itself has no representation for them.
std::string num_to_string(double v) {
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  return nlohmann::json(v).dump();
}

nlohmann::ordered_json num_to_json(double v) {
  if (std::isinf(v)) {
    return nlohmann::ordered_json(v > 0 ? "inf" : "-inf");
  }
  return nlohmann::ordered_json(v);
}

void require_same_shape(const ImageFrame& a, const ImageFrame& b, const char* op) {
  if (a.height != b.height || a.width != b.width || a.channels != b.channels) {
    throw ContractError(std::string(op) + ": shape mismatch, " + std::to_string(a.height) + "x" +
                        std::to_string(a.width) + "x" + std::to_string(a.channels) + " vs " +
                        std::to_string(b.height) + "x" + std::to_string(b.width) + "x" +
                        std::to_string(b.channels));
  }
  if (a.max_value != b.max_value) {
    throw ContractError(std::string(op) + ": max_value mismatch");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// FeatureSet
// ---------------------------------------------------------------------------

FeatureSet FeatureSet::from_samples(const std::vector<double>& rows, std::size_t n, int d) {
  if (d < 1 || rows.size() != n * static_cast<std::size_t>(d)) {
    throw ContractError("feature set: rows length does not match n x d");
  }
  if (n < 2) {
    throw ContractError("feature set: need at least 2 samples, got " + std::to_string(n));
  }
  FeatureSet s;
  s.dim = d;
  s.n_samples = n;
  s.mean.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) {
      s.mean[j] += rows[i * d + j];
    }
  }
  for (double& m : s.mean) {
    m /= static_cast<double>(n);
  }
  // Sample (n-1) covariance.
  s.cov.assign(static_cast<std::size_t>(d) * d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) {
      const double dj = rows[i * d + j] - s.mean[j];
      for (int k = j; k < d; ++k) {
        s.cov[static_cast<std::size_t>(j) * d + k] += dj * (rows[i * d + k] - s.mean[k]);
      }
    }
  }
  for (int j = 0; j < d; ++j) {
    for (int k = j; k < d; ++k) {
      const double c = s.cov[static_cast<std::size_t>(j) * d + k] / static_cast<double>(n - 1);
      s.cov[static_cast<std::size_t>(j) * d + k] = c;
      s.cov[static_cast<std::size_t>(k) * d + j] = c;
    }
  }
  return s;
}

FeatureSet FeatureSet::from_moments(std::vector<double> mean, std::vector<double> cov) {
  FeatureSet s;
  s.dim = static_cast<int>(mean.size());
  if (s.dim < 1 || cov.size() != static_cast<std::size_t>(s.dim) * s.dim) {
    throw ContractError("feature set: covariance is not dim x dim");
  }
  double fro = 0.0, asym = 0.0;
  for (int j = 0; j < s.dim; ++j) {
    for (int k = 0; k < s.dim; ++k) {
      fro += cov[static_cast<std::size_t>(j) * s.dim + k] *
             cov[static_cast<std::size_t>(j) * s.dim + k];
      asym = std::max(asym, std::abs(cov[static_cast<std::size_t>(j) * s.dim + k] -
                                     cov[static_cast<std::size_t>(k) * s.dim + j]));
    }
  }
  fro = std::sqrt(fro);
  if (asym > 1e-8 * std::max(fro, 1e-300)) {
    throw ContractError("feature set: covariance is not symmetric");
  }
  s.mean = std::move(mean);
  s.cov = std::move(cov);
  s.n_samples = 0;
  return s;
}

// ---------------------------------------------------------------------------
// PSNR
// ---------------------------------------------------------------------------

double psnr(const ImageFrame& a, const ImageFrame& b) {
  require_same_shape(a, b, "psnr");
  double mse = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const double d = static_cast<double>(a.pixels[i]) - b.pixels[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.pixels.size());
  if (mse == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return 10.0 * std::log10(a.max_value * a.max_value / mse);
}

// ---------------------------------------------------------------------------
// SSIM
// ---------------------------------------------------------------------------

namespace {

// Valid-mode separable convolution with a 1-D kernel, horizontal then
// vertical; `in` is (h, w) row-major.
std::vector<double> conv_valid(const std::vector<double>& in, int h, int w,
                               const std::vector<double>& kernel) {
  const int k = static_cast<int>(kernel.size());
  const int wo = w - k + 1;
  const int ho = h - k + 1;
  std::vector<double> mid(static_cast<std::size_t>(h) * wo);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < wo; ++c) {
      double acc = 0.0;
      for (int i = 0; i < k; ++i) {
        acc += kernel[i] * in[static_cast<std::size_t>(r) * w + c + i];
      }
      mid[static_cast<std::size_t>(r) * wo + c] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ho) * wo);
  for (int r = 0; r < ho; ++r) {
    for (int c = 0; c < wo; ++c) {
      double acc = 0.0;
      for (int i = 0; i < k; ++i) {
        acc += kernel[i] * mid[static_cast<std::size_t>(r + i) * wo + c];
      }
      out[static_cast<std::size_t>(r) * wo + c] = acc;
    }
  }
  return out;
}

}  // namespace

double ssim(const ImageFrame& a, const ImageFrame& b, const SSIMConfig& cfg) {
  require_same_shape(a, b, "ssim");
  if (cfg.window < 1 || cfg.sigma <= 0.0) {
    throw ContractError("ssim: window and sigma must be positive");
  }
  if (a.height < cfg.window || a.width < cfg.window) {
    throw ContractError("ssim: image " + std::to_string(a.height) + "x" +
                        std::to_string(a.width) + " is smaller than the " +
                        std::to_string(cfg.window) + "-pixel window");
  }

  std::vector<double> kernel(cfg.window);
  const double c = (cfg.window - 1) / 2.0;
  double ksum = 0.0;
  for (int i = 0; i < cfg.window; ++i) {
    kernel[i] = std::exp(-(i - c) * (i - c) / (2.0 * cfg.sigma * cfg.sigma));
    ksum += kernel[i];
  }
  for (double& k : kernel) {
    k /= ksum;
  }

  const std::vector<double> x = to_gray(a);
  const std::vector<double> y = to_gray(b);
  const std::size_t n = x.size();
  std::vector<double> xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }

  const int h = a.height, w = a.width;
  const std::vector<double> mu_x = conv_valid(x, h, w, kernel);
  const std::vector<double> mu_y = conv_valid(y, h, w, kernel);
  const std::vector<double> e_xx = conv_valid(xx, h, w, kernel);
  const std::vector<double> e_yy = conv_valid(yy, h, w, kernel);
  const std::vector<double> e_xy = conv_valid(xy, h, w, kernel);

  const double L = a.max_value;
  const double c1 = (cfg.k1 * L) * (cfg.k1 * L);
  const double c2 = (cfg.k2 * L) * (cfg.k2 * L);

  double total = 0.0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    const double var_x = e_xx[i] - mu_x[i] * mu_x[i];
    const double var_y = e_yy[i] - mu_y[i] * mu_y[i];
    const double cov_xy = e_xy[i] - mu_x[i] * mu_y[i];
    const double num = (2.0 * mu_x[i] * mu_y[i] + c1) * (2.0 * cov_xy + c2);
    const double den = (mu_x[i] * mu_x[i] + mu_y[i] * mu_y[i] + c1) * (var_x + var_y + c2);
    total += num / den;
  }
  return total / static_cast<double>(mu_x.size());
}

// ---------------------------------------------------------------------------
// LPIPS
// ---------------------------------------------------------------------------

PatchEmbedder grid_stat_embedder(int grid) {
  if (grid < 1) {
    throw ContractError("grid embedder: grid must be >= 1");
  }
  return [grid](const ImageFrame& img) {
    if (img.height < grid || img.width < grid) {
      throw ContractError("grid embedder: image " + std::to_string(img.height) + "x" +
                          std::to_string(img.width) + " is smaller than the " +
                          std::to_string(grid) + "x" + std::to_string(grid) + " grid");
    }
    const std::vector<double> gray = to_gray(img);
    std::vector<std::vector<double>> features;
    features.reserve(static_cast<std::size_t>(grid) * grid);
    for (int gi = 0; gi < grid; ++gi) {
      const int r0 = gi * img.height / grid;
      const int r1 = (gi + 1) * img.height / grid;
      for (int gj = 0; gj < grid; ++gj) {
        const int c0 = gj * img.width / grid;
        const int c1 = (gj + 1) * img.width / grid;
        double sum = 0.0, sum2 = 0.0;
        double gx = 0.0, gy = 0.0;
        std::size_t n = 0, nx = 0, ny = 0;
        for (int r = r0; r < r1; ++r) {
          for (int cc = c0; cc < c1; ++cc) {
            const double v = gray[static_cast<std::size_t>(r) * img.width + cc];
            sum += v;
            sum2 += v * v;
            ++n;
            if (cc + 1 < c1) {
              gx += gray[static_cast<std::size_t>(r) * img.width + cc + 1] - v;
              ++nx;
            }
            if (r + 1 < r1) {
              gy += gray[static_cast<std::size_t>(r + 1) * img.width + cc] - v;
              ++ny;
            }
          }
        }
        const double mean = sum / static_cast<double>(n);
        const double var = std::max(0.0, sum2 / static_cast<double>(n) - mean * mean);
        features.push_back({mean, std::sqrt(var), nx ? gx / static_cast<double>(nx) : 0.0,
                            ny ? gy / static_cast<double>(ny) : 0.0});
      }
    }
    return features;
  };
}

double lpips_from_features(const std::vector<std::vector<double>>& fa,
                           const std::vector<std::vector<double>>& fb) {
  if (fa.size() != fb.size() || fa.empty()) {
    throw ContractError("lpips: patch count mismatch, " + std::to_string(fa.size()) + " vs " +
                        std::to_string(fb.size()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < fa.size(); ++i) {
    if (fa[i].size() != fb[i].size()) {
      throw ContractError("lpips: feature dimension mismatch at patch " + std::to_string(i));
    }
    double d2 = 0.0;
    for (std::size_t j = 0; j < fa[i].size(); ++j) {
      const double d = fa[i][j] - fb[i][j];
      d2 += d * d;
    }
    total += std::sqrt(d2);
  }
  return total / static_cast<double>(fa.size());
}

double lpips(const ImageFrame& a, const ImageFrame& b, const PatchEmbedder& embedder) {
  return lpips_from_features(embedder(a), embedder(b));
}

// ---------------------------------------------------------------------------
// LMD / AUE / Sync
// ---------------------------------------------------------------------------

double lmd(const LandmarkSet& a, const LandmarkSet& b) {
  if (a.points.empty() || a.points.size() != b.points.size()) {
    throw ContractError("lmd: landmark count mismatch, " + std::to_string(a.points.size()) +
                        " vs " + std::to_string(b.points.size()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    const double dx = a.points[i][0] - b.points[i][0];
    const double dy = a.points[i][1] - b.points[i][1];
    total += std::sqrt(dx * dx + dy * dy);
  }
  return total / static_cast<double>(a.points.size());
}

double aue_lower(const AUVector& a, const AUVector& b, const std::vector<int>& subset) {
  if (subset.empty()) {
    throw ContractError("aue: AU subset is empty");
  }
  double total = 0.0;
  for (int id : subset) {
    const auto ia = a.intensities.find(id);
    const auto ib = b.intensities.find(id);
    if (ia == a.intensities.end() || ib == b.intensities.end()) {
      throw ContractError("aue: AU " + std::to_string(id) + " missing from an input vector");
    }
    const double d = ia->second - ib->second;
    total += d * d;
  }
  return total / static_cast<double>(subset.size());
}

double sync_conf(const EmbeddingPairSeries& series) {
  if (series.count < 1 || series.dim < 1) {
    throw ContractError("sync: need at least one embedding pair");
  }
  const std::size_t expect = series.count * static_cast<std::size_t>(series.dim);
  if (series.video.size() != expect || series.audio.size() != expect) {
    throw ContractError("sync: video/audio matrices must both be count x dim");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < series.count; ++i) {
    const double* v = &series.video[i * series.dim];
    const double* s = &series.audio[i * series.dim];
    double dot = 0.0, nv = 0.0, ns = 0.0;
    for (int j = 0; j < series.dim; ++j) {
      dot += v[j] * s[j];
      nv += v[j] * v[j];
      ns += s[j] * s[j];
    }
    const double cosv = dot / std::max(std::sqrt(nv) * std::sqrt(ns), series.eps);
    total += std::clamp(cosv, -1.0, 1.0);
  }
  return total / static_cast<double>(series.count);
}

// ---------------------------------------------------------------------------
// FID
// ---------------------------------------------------------------------------

std::vector<double> sqrtm_psd(const std::vector<double>& m, int d) {
  if (d < 1 || m.size() != static_cast<std::size_t>(d) * d) {
    throw ContractError("sqrtm: matrix is not d x d");
  }
  using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const Mat> a(m.data(), d, d);
  const double fro = a.norm();
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-8 * std::max(fro, 1e-300)) {
    throw ContractError("sqrtm: matrix is not symmetric");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) {
    throw ContractError("sqrtm: eigendecomposition did not converge");
  }
  Eigen::VectorXd lam = solver.eigenvalues();
  for (int i = 0; i < d; ++i) {
    if (lam[i] < -1e-8 * std::max(fro, 1e-300)) {
      throw ContractError("sqrtm: matrix has eigenvalue " + std::to_string(lam[i]) +
                          ", not positive semidefinite");
    }
    lam[i] = std::sqrt(std::max(lam[i], 0.0));
  }
  const Eigen::MatrixXd root =
      solver.eigenvectors() * lam.asDiagonal() * solver.eigenvectors().transpose();

  std::vector<double> out(static_cast<std::size_t>(d) * d);
  Eigen::Map<Mat>(out.data(), d, d) = root;
  return out;
}

double fid(const FeatureSet& real, const FeatureSet& gen) {
  if (real.dim != gen.dim || real.dim < 1) {
    throw ContractError("fid: feature dimension mismatch, " + std::to_string(real.dim) + " vs " +
                        std::to_string(gen.dim));
  }
  const int d = real.dim;

  double mean_term = 0.0;
  for (int j = 0; j < d; ++j) {
    const double diff = real.mean[j] - gen.mean[j];
    mean_term += diff * diff;
  }

  // Tr sqrtm(S_r S_g) computed through the symmetric product
  // S_g^1/2 S_r S_g^1/2, which has the same eigenvalues.
  using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const std::vector<double> g_half = sqrtm_psd(gen.cov, d);
  Eigen::Map<const Mat> sr(real.cov.data(), d, d);
  Eigen::Map<const Mat> gh(g_half.data(), d, d);
  Eigen::MatrixXd prod = gh * sr * gh;
  prod = 0.5 * (prod + prod.transpose().eval());  // kill round-off asymmetry

  std::vector<double> prod_v(static_cast<std::size_t>(d) * d);
  Eigen::Map<Mat>(prod_v.data(), d, d) = prod;
  const std::vector<double> root = sqrtm_psd(prod_v, d);

  double trace_term = 0.0;
  for (int j = 0; j < d; ++j) {
    trace_term += real.cov[static_cast<std::size_t>(j) * d + j] +
                  gen.cov[static_cast<std::size_t>(j) * d + j] -
                  2.0 * root[static_cast<std::size_t>(j) * d + j];
  }
  // Exact-identity and near-identity inputs can land a hair below zero.
  return std::max(0.0, mean_term + trace_term);
}

// ---------------------------------------------------------------------------
// CSV side files
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  return fields;
}

bool is_number(const std::string& s) {
  if (s.empty()) {
    return false;
  }
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

// Rows of numeric fields; a leading non-numeric line is treated as a header.
std::vector<std::vector<double>> read_numeric_csv(const std::string& path,
                                                  std::size_t n_columns) {
  std::ifstream in(path);
  if (!in) {
    throw ManifestError("cannot open CSV side file: " + path);
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    const std::vector<std::string> fields = split_csv_line(line);
    if (first && !fields.empty() && !is_number(fields[0])) {
      first = false;
      continue;  // header row
    }
    first = false;
    if (fields.size() != n_columns) {
      throw FormatError("CSV " + path + ": expected " + std::to_string(n_columns) +
                        " columns, got " + std::to_string(fields.size()));
    }
    std::vector<double> row;
    for (const std::string& f : fields) {
      if (!is_number(f)) {
        throw FormatError("CSV " + path + ": non-numeric field \"" + f + "\"");
      }
      row.push_back(std::strtod(f.c_str(), nullptr));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// frame_index,point_index,x,y -> per-frame landmark sets; every frame in
// [0, n_frames) must be fully populated with points 0..N-1.
std::vector<LandmarkSet> read_landmark_csv(const std::string& path, std::size_t n_frames) {
  std::vector<std::map<int, std::array<double, 2>>> staged(n_frames);
  for (const std::vector<double>& row : read_numeric_csv(path, 4)) {
    const long frame = std::lround(row[0]);
    const int point = static_cast<int>(std::lround(row[1]));
    if (frame < 0 || static_cast<std::size_t>(frame) >= n_frames) {
      throw ManifestError("landmark CSV " + path + " names frame " + std::to_string(frame) +
                          " but the corpus has " + std::to_string(n_frames) + " frames");
    }
    staged[static_cast<std::size_t>(frame)][point] = {row[2], row[3]};
  }
  std::vector<LandmarkSet> out(n_frames);
  for (std::size_t f = 0; f < n_frames; ++f) {
    if (staged[f].empty()) {
      throw ManifestError("landmark CSV " + path + " has no points for frame " +
                          std::to_string(f));
    }
    int expect = 0;
    for (const auto& [point, xy] : staged[f]) {
      if (point != expect++) {
        throw ManifestError("landmark CSV " + path + " frame " + std::to_string(f) +
                            ": point indices are not contiguous from 0");
      }
      out[f].points.push_back(xy);
    }
  }
  return out;
}

// frame_index,au_id,intensity -> per-frame AU vectors.
std::vector<AUVector> read_au_csv(const std::string& path, std::size_t n_frames) {
  std::vector<AUVector> out(n_frames);
  for (const std::vector<double>& row : read_numeric_csv(path, 3)) {
    const long frame = std::lround(row[0]);
    if (frame < 0 || static_cast<std::size_t>(frame) >= n_frames) {
      throw ManifestError("AU CSV " + path + " names frame " + std::to_string(frame) +
                          " but the corpus has " + std::to_string(n_frames) + " frames");
    }
    out[static_cast<std::size_t>(frame)].intensities[static_cast<int>(std::lround(row[1]))] =
        row[2];
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Manifest + suite
// ---------------------------------------------------------------------------

EvalManifest EvalManifest::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open manifest: " + path);
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ManifestError("manifest " + path + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) {
    throw ManifestError("manifest " + path + " must be a JSON object");
  }

  const fs::path base = fs::path(path).parent_path();
  const auto resolve = [&base](const nlohmann::json& v, const char* what) {
    if (!v.is_string()) {
      throw ManifestError(std::string("manifest: ") + what + " must be a file path string");
    }
    const fs::path p(v.get<std::string>());
    return (p.is_absolute() ? p : base / p).string();
  };
  const auto pair_entry = [&](const char* key, std::string& pred, std::string& truth) {
    if (!j.contains(key)) {
      return;
    }
    const nlohmann::json& e = j[key];
    if (!e.is_object() || !e.contains("pred") || !e.contains("truth")) {
      throw ManifestError(std::string("manifest: \"") + key +
                          "\" needs \"pred\" and \"truth\" entries");
    }
    pred = resolve(e["pred"], key);
    truth = resolve(e["truth"], key);
  };

  EvalManifest m;
  if (j.contains("frames")) {
    if (!j["frames"].is_array()) {
      throw ManifestError("manifest: \"frames\" must be an array of file names");
    }
    for (const auto& f : j["frames"]) {
      if (!f.is_string()) {
        throw ManifestError("manifest: \"frames\" entries must be strings");
      }
      m.frames.push_back(f.get<std::string>());
    }
  }
  pair_entry("landmarks", m.landmarks_pred, m.landmarks_truth);
  pair_entry("aus", m.aus_pred, m.aus_truth);
  pair_entry("fid_features", m.fid_pred, m.fid_truth);
  pair_entry("lpips_features", m.lpips_pred, m.lpips_truth);
  if (j.contains("sync")) {
    const nlohmann::json& e = j["sync"];
    if (!e.is_object() || !e.contains("video") || !e.contains("audio")) {
      throw ManifestError("manifest: \"sync\" needs \"video\" and \"audio\" entries");
    }
    m.sync_video = resolve(e["video"], "sync");
    m.sync_audio = resolve(e["audio"], "sync");
  }
  if (j.contains("au_subset")) {
    if (!j["au_subset"].is_array() || j["au_subset"].empty()) {
      throw ManifestError("manifest: \"au_subset\" must be a non-empty array of AU ids");
    }
    m.au_subset.clear();
    for (const auto& id : j["au_subset"]) {
      if (!id.is_number_integer()) {
        throw ManifestError("manifest: \"au_subset\" entries must be integers");
      }
      m.au_subset.push_back(id.get<int>());
    }
  }
  return m;
}

bool QualityReport::has(const std::string& metric) const {
  for (const auto& [name, value] : means) {
    if (name == metric) {
      return true;
    }
  }
  return false;
}

double QualityReport::mean_of(const std::string& metric) const {
  for (const auto& [name, value] : means) {
    if (name == metric) {
      return value;
    }
  }
  throw ContractError("quality report has no metric \"" + metric + "\"");
}

std::string QualityReport::to_json(bool include_series) const {
  nlohmann::ordered_json j;
  j["n_frames"] = n_frames;
  j["means"] = nlohmann::ordered_json::object();
  for (const auto& [name, value] : means) {
    j["means"][name] = num_to_json(value);
  }
  if (include_series) {
    j["per_frame"] = nlohmann::ordered_json::object();
    for (const auto& [name, value] : means) {
      const auto it = per_frame.find(name);
      if (it == per_frame.end()) {
        continue;
      }
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (double v : it->second) {
        arr.push_back(num_to_json(v));
      }
      j["per_frame"][name] = std::move(arr);
    }
  }
  return j.dump();
}

std::string QualityReport::to_csv() const {
  // Per-frame table; corpus-level metrics (FID) have no frame series and are
  // left to the JSON report.
  std::vector<std::string> columns;
  for (const auto& [name, value] : means) {
    if (per_frame.count(name)) {
      columns.push_back(name);
    }
  }
  std::ostringstream out;
  out << "frame_index";
  for (const std::string& c : columns) {
    out << ',' << c;
  }
  out << '\n';
  for (std::size_t f = 0; f < n_frames; ++f) {
    out << f;
    for (const std::string& c : columns) {
      out << ',' << num_to_string(per_frame.at(c)[f]);
    }
    out << '\n';
  }
  return out.str();
}

namespace {

std::vector<std::string> list_frame_files(const std::string& dir) {
  if (!fs::is_directory(dir)) {
    throw ManifestError("frame directory does not exist: " + dir);
  }
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) {
      continue;
    }
    const std::string ext = entry.path().extension().string();
    if (ext == ".pgm" || ext == ".ppm" || ext == ".img") {
      names.push_back(entry.path().filename().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

Tensor read_side_tensor(const std::string& path, const char* what) {
  try {
    return read_tensor(path);
  } catch (const IoError& e) {
    throw ManifestError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

QualityReport evaluate_suite(const std::string& pred_dir, const std::string& truth_dir,
                             const EvalManifest& manifest, const std::set<std::string>& metrics) {
  static const std::vector<std::string> kOrder = {"psnr", "ssim", "lpips", "lmd",
                                                  "fid",  "aue",  "sync"};
  for (const std::string& m : metrics) {
    if (std::find(kOrder.begin(), kOrder.end(), m) == kOrder.end()) {
      throw ManifestError("unknown metric \"" + m + "\"");
    }
  }
  const auto selected = [&metrics](const char* name) {
    return metrics.empty() || metrics.count(name) > 0;
  };

  const std::vector<std::string> pred_names =
      manifest.frames.empty() ? list_frame_files(pred_dir) : manifest.frames;
  const std::vector<std::string> truth_names =
      manifest.frames.empty() ? list_frame_files(truth_dir) : manifest.frames;
  if (pred_names.size() != truth_names.size()) {
    throw ManifestError("frame count mismatch: pred has " + std::to_string(pred_names.size()) +
                        " frames, truth has " + std::to_string(truth_names.size()));
  }
  const std::size_t n_frames = pred_names.size();
  if (n_frames == 0) {
    throw ManifestError("no frames found under " + pred_dir);
  }

  const bool have_lmd = !manifest.landmarks_pred.empty() && !manifest.landmarks_truth.empty();
  const bool have_aue = !manifest.aus_pred.empty() && !manifest.aus_truth.empty();
  const bool have_sync = !manifest.sync_video.empty() && !manifest.sync_audio.empty();
  const bool have_lpips_files = !manifest.lpips_pred.empty() && !manifest.lpips_truth.empty();
  if (!metrics.empty()) {
    if (metrics.count("lmd") && !have_lmd) {
      throw ManifestError("metric lmd requested but the manifest has no landmark files");
    }
    if (metrics.count("aue") && !have_aue) {
      throw ManifestError("metric aue requested but the manifest has no AU files");
    }
    if (metrics.count("sync") && !have_sync) {
      throw ManifestError("metric sync requested but the manifest has no embedding files");
    }
  }

  const bool want_psnr = selected("psnr");
  const bool want_ssim = selected("ssim");
  const bool want_lpips = selected("lpips");
  const bool want_lmd = selected("lmd") && have_lmd;
  const bool want_aue = selected("aue") && have_aue;
  const bool want_sync = selected("sync") && have_sync;
  // FID needs two samples; with the default selection it drops out of tiny
  // corpora instead of failing them.
  const bool have_fid_files = !manifest.fid_pred.empty() && !manifest.fid_truth.empty();
  bool want_fid = selected("fid") && (have_fid_files || n_frames >= 2);
  if (!metrics.empty() && metrics.count("fid") && !want_fid) {
    throw ManifestError("metric fid requested but the corpus has fewer than 2 frames");
  }

  std::vector<LandmarkSet> lm_pred, lm_truth;
  if (want_lmd) {
    lm_pred = read_landmark_csv(manifest.landmarks_pred, n_frames);
    lm_truth = read_landmark_csv(manifest.landmarks_truth, n_frames);
  }
  std::vector<AUVector> au_pred, au_truth;
  if (want_aue) {
    au_pred = read_au_csv(manifest.aus_pred, n_frames);
    au_truth = read_au_csv(manifest.aus_truth, n_frames);
  }

  const PatchEmbedder embedder = grid_stat_embedder();
  std::vector<Tensor> lpips_side;  // pred, truth feature tensors (n_frames, N, d)
  if (want_lpips && have_lpips_files) {
    lpips_side.push_back(read_side_tensor(manifest.lpips_pred, "lpips features"));
    lpips_side.push_back(read_side_tensor(manifest.lpips_truth, "lpips features"));
    for (const Tensor& t : lpips_side) {
      if (t.shape.size() != 3 || t.shape[0] != n_frames) {
        throw ManifestError("lpips feature tensors must be (n_frames, patches, dim)");
      }
    }
  }

  QualityReport report;
  report.n_frames = n_frames;
  std::map<std::string, std::vector<double>> series;

  std::vector<double> fid_pred_rows, fid_truth_rows;
  std::size_t fid_dim = 0;

  for (std::size_t f = 0; f < n_frames; ++f) {
    const ImageFrame pred = load_image((fs::path(pred_dir) / pred_names[f]).string());
    const ImageFrame truth = load_image((fs::path(truth_dir) / truth_names[f]).string());

    if (want_psnr) {
      series["psnr"].push_back(psnr(pred, truth));
    }
    if (want_ssim) {
      series["ssim"].push_back(ssim(pred, truth));
    }
    if (want_lpips) {
      if (have_lpips_files) {
        const auto slice = [f](const Tensor& t) {
          const std::size_t patches = t.shape[1], dim = t.shape[2];
          std::vector<std::vector<double>> out(patches, std::vector<double>(dim));
          for (std::size_t p = 0; p < patches; ++p) {
            for (std::size_t j = 0; j < dim; ++j) {
              out[p][j] = t.data[(f * patches + p) * dim + j];
            }
          }
          return out;
        };
        series["lpips"].push_back(lpips_from_features(slice(lpips_side[0]), slice(lpips_side[1])));
      } else {
        series["lpips"].push_back(lpips(pred, truth, embedder));
      }
    }
    if (want_lmd) {
      series["lmd"].push_back(lmd(lm_pred[f], lm_truth[f]));
    }
    if (want_aue) {
      series["aue"].push_back(aue_lower(au_pred[f], au_truth[f], manifest.au_subset));
    }
    if (want_fid && !have_fid_files) {
      // Flattened grid statistics double as the frame-level feature vector.
      const auto flatten = [](const std::vector<std::vector<double>>& patches) {
        std::vector<double> flat;
        for (const auto& p : patches) {
          flat.insert(flat.end(), p.begin(), p.end());
        }
        return flat;
      };
      const std::vector<double> fp = flatten(embedder(pred));
      const std::vector<double> ft = flatten(embedder(truth));
      if (fid_dim == 0) {
        fid_dim = fp.size();
      }
      if (fp.size() != fid_dim || ft.size() != fid_dim) {
        throw ContractError("fid: frame feature dimensions differ across the corpus");
      }
      fid_pred_rows.insert(fid_pred_rows.end(), fp.begin(), fp.end());
      fid_truth_rows.insert(fid_truth_rows.end(), ft.begin(), ft.end());
    }
  }

  double sync_mean = 0.0;
  if (want_sync) {
    const Tensor tv = read_side_tensor(manifest.sync_video, "sync embeddings");
    const Tensor ta = read_side_tensor(manifest.sync_audio, "sync embeddings");
    if (tv.shape.size() != 2 || ta.shape.size() != 2 || tv.shape != ta.shape) {
      throw ManifestError("sync embeddings must be two tensors of identical (N, d) shape");
    }
    if (tv.shape[0] != n_frames) {
      throw ManifestError("sync embeddings have " + std::to_string(tv.shape[0]) +
                          " rows but the corpus has " + std::to_string(n_frames) + " frames");
    }
    EmbeddingPairSeries s;
    s.count = tv.shape[0];
    s.dim = static_cast<int>(tv.shape[1]);
    s.video.assign(tv.data.begin(), tv.data.end());
    s.audio.assign(ta.data.begin(), ta.data.end());
    sync_mean = sync_conf(s);
    // Per-frame cosine terms for the series output.
    for (std::size_t i = 0; i < s.count; ++i) {
      EmbeddingPairSeries one;
      one.count = 1;
      one.dim = s.dim;
      one.video.assign(s.video.begin() + i * s.dim, s.video.begin() + (i + 1) * s.dim);
      one.audio.assign(s.audio.begin() + i * s.dim, s.audio.begin() + (i + 1) * s.dim);
      series["sync"].push_back(sync_conf(one));
    }
  }

  double fid_value = 0.0;
  if (want_fid) {
    FeatureSet set_pred, set_truth;
    if (have_fid_files) {
      const Tensor tp = read_side_tensor(manifest.fid_pred, "fid features");
      const Tensor tt = read_side_tensor(manifest.fid_truth, "fid features");
      if (tp.shape.size() != 2 || tt.shape.size() != 2) {
        throw ManifestError("fid feature tensors must be 2-D (n_samples, dim)");
      }
      const auto to_set = [](const Tensor& t) {
        std::vector<double> rows(t.data.begin(), t.data.end());
        return FeatureSet::from_samples(rows, t.shape[0], static_cast<int>(t.shape[1]));
      };
      set_pred = to_set(tp);
      set_truth = to_set(tt);
    } else {
      set_pred = FeatureSet::from_samples(fid_pred_rows, n_frames, static_cast<int>(fid_dim));
      set_truth = FeatureSet::from_samples(fid_truth_rows, n_frames, static_cast<int>(fid_dim));
    }
    fid_value = fid(set_truth, set_pred);
  }

  const auto mean_of_series = [](const std::vector<double>& v) {
    double total = 0.0;
    for (double x : v) {
      total += x;
    }
    return total / static_cast<double>(v.size());
  };
  for (const std::string& name : kOrder) {
    if (name == "fid") {
      if (want_fid) {
        report.means.emplace_back("fid", fid_value);
      }
    } else if (name == "sync") {
      if (want_sync) {
        report.means.emplace_back("sync", sync_mean);
      }
    } else if (series.count(name)) {
      report.means.emplace_back(name, mean_of_series(series[name]));
    }
  }
  report.per_frame = std::move(series);
  return report;
}

}  // namespace avtk
