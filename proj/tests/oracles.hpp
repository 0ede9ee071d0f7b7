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

// Naive, independent re-derivations of every formula under test. These trade
// speed for obviousness (plain loops, textbook definitions) so they can serve
// as oracles against the production implementations.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

// --------------------------------------------------------------------------
// Signal processing
// --------------------------------------------------------------------------

/// O(n^2) DFT power spectrum, bins 0..n/2.
inline std::vector<double> dft_power(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> power(n / 2 + 1);
  for (std::size_t k = 0; k < power.size(); ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -2.0 * kPi * static_cast<double>(k) * static_cast<double>(t) /
                         static_cast<double>(n);
      re += x[t] * std::cos(ang);
      im += x[t] * std::sin(ang);
    }
    power[k] = re * re + im * im;
  }
  return power;
}

/// Slaney-style mel scale, re-derived from the piecewise definition.
inline double hz_to_mel(double hz) {
  return hz < 1000.0 ? hz / (200.0 / 3.0) : 15.0 + std::log(hz / 1000.0) * (27.0 / std::log(6.4));
}

inline double mel_to_hz(double mel) {
  return mel < 15.0 ? mel * (200.0 / 3.0) : 1000.0 * std::pow(6.4, (mel - 15.0) / 27.0);
}

/// Center frequency of each triangular mel filter (edge k+1 of the n+2 grid).
inline std::vector<double> mel_filter_centers(int n_mels, double fmin, double fmax) {
  std::vector<double> centers(n_mels);
  const double lo = hz_to_mel(fmin), hi = hz_to_mel(fmax);
  for (int m = 0; m < n_mels; ++m) {
    centers[m] = mel_to_hz(lo + (hi - lo) * (m + 1) / (n_mels + 1));
  }
  return centers;
}

/// Clamp-and-scale normalization recomputed from its definition.
inline std::vector<double> normalize_clamp_scale(const std::vector<double>& values) {
  double peak = values[0];
  for (double v : values) {
    peak = std::max(peak, v);
  }
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = (std::max(values[i], peak - 8.0) + 4.0) / 4.0;
  }
  return out;
}

// --------------------------------------------------------------------------
// Alignment
// --------------------------------------------------------------------------

/// Count stride-s windows of length w by literally enumerating placements
/// over the zero-padded index range.
inline std::size_t window_count_brute(std::size_t t_enc, int w, int s, int p) {
  const std::size_t padded = t_enc + 2 * static_cast<std::size_t>(p);
  std::size_t count = 0;
  for (std::size_t start = 0; start + w <= padded; start += s) {
    ++count;
  }
  return count;
}

/// Gather windows from an explicitly materialized zero-padded copy.
inline std::vector<float> gather_brute(const std::vector<float>& rows, std::size_t t_enc, int dim,
                                       int w, int s, int p) {
  const std::size_t padded_len = t_enc + 2 * static_cast<std::size_t>(p);
  std::vector<float> padded(padded_len * dim, 0.0f);
  for (std::size_t t = 0; t < t_enc; ++t) {
    for (int c = 0; c < dim; ++c) {
      padded[(t + p) * dim + c] = rows[t * dim + c];
    }
  }
  const std::size_t n = window_count_brute(t_enc, w, s, p);
  std::vector<float> out(n * w * static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < w; ++j) {
      for (int c = 0; c < dim; ++c) {
        out[(i * w + j) * dim + c] = padded[(i * s + j) * static_cast<std::size_t>(dim) + c];
      }
    }
  }
  return out;
}

// --------------------------------------------------------------------------
// Encoder pieces
// --------------------------------------------------------------------------

/// GELU through the Gaussian CDF via erfc (different call path than erf).
inline double gelu_cdf(double x) {
  const double phi = 0.5 * std::erfc(-x / std::sqrt(2.0));
  return x * phi;
}

/// y = gelu(P^T x) computed with plain loops.
inline std::vector<double> project_gelu(const std::vector<double>& x,
                                        const std::vector<float>& proj, int in_dim, int out_dim,
                                        bool apply_gelu) {
  std::vector<double> y(out_dim, 0.0);
  for (int c = 0; c < out_dim; ++c) {
    for (int i = 0; i < in_dim; ++i) {
      y[c] += x[i] * static_cast<double>(proj[static_cast<std::size_t>(i) * out_dim + c]);
    }
    if (apply_gelu) {
      y[c] = gelu_cdf(y[c]);
    }
  }
  return y;
}

// --------------------------------------------------------------------------
// Metric formulas
// --------------------------------------------------------------------------

inline double mse_naive(const std::vector<float>& a, const std::vector<float>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

inline double psnr_naive(const std::vector<float>& a, const std::vector<float>& b,
                         double max_value) {
  const double mse = mse_naive(a, b);
  return 10.0 * std::log10(max_value * max_value / mse);
}

/// Direct sliding-window SSIM: explicit 2-D Gaussian weights per window.
inline double ssim_naive(const std::vector<double>& x, const std::vector<double>& y, int h, int w,
                         double max_value, int window = 11, double sigma = 1.5, double k1 = 0.01,
                         double k2 = 0.03) {
  std::vector<double> g(static_cast<std::size_t>(window) * window);
  const double c = (window - 1) / 2.0;
  double gsum = 0.0;
  for (int r = 0; r < window; ++r) {
    for (int cc = 0; cc < window; ++cc) {
      g[static_cast<std::size_t>(r) * window + cc] =
          std::exp(-((r - c) * (r - c) + (cc - c) * (cc - c)) / (2.0 * sigma * sigma));
      gsum += g[static_cast<std::size_t>(r) * window + cc];
    }
  }
  for (double& v : g) {
    v /= gsum;
  }

  const double c1 = (k1 * max_value) * (k1 * max_value);
  const double c2 = (k2 * max_value) * (k2 * max_value);
  double total = 0.0;
  std::size_t count = 0;
  for (int r0 = 0; r0 + window <= h; ++r0) {
    for (int c0 = 0; c0 + window <= w; ++c0) {
      double mx = 0.0, my = 0.0, exx = 0.0, eyy = 0.0, exy = 0.0;
      for (int r = 0; r < window; ++r) {
        for (int cc = 0; cc < window; ++cc) {
          const double wgt = g[static_cast<std::size_t>(r) * window + cc];
          const double xv = x[static_cast<std::size_t>(r0 + r) * w + c0 + cc];
          const double yv = y[static_cast<std::size_t>(r0 + r) * w + c0 + cc];
          mx += wgt * xv;
          my += wgt * yv;
          exx += wgt * xv * xv;
          eyy += wgt * yv * yv;
          exy += wgt * xv * yv;
        }
      }
      const double vx = exx - mx * mx;
      const double vy = eyy - my * my;
      const double cxy = exy - mx * my;
      total += ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) /
               ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

/// Grid-stat patch features recomputed from the stated definition: per patch
/// (mean, population std, mean horizontal gradient, mean vertical gradient).
inline std::vector<std::vector<double>> grid_stats_naive(const std::vector<double>& gray, int h,
                                                         int w, int grid) {
  std::vector<std::vector<double>> feats;
  for (int gi = 0; gi < grid; ++gi) {
    for (int gj = 0; gj < grid; ++gj) {
      const int r0 = gi * h / grid, r1 = (gi + 1) * h / grid;
      const int c0 = gj * w / grid, c1 = (gj + 1) * w / grid;
      std::vector<double> patch;
      for (int r = r0; r < r1; ++r) {
        for (int cc = c0; cc < c1; ++cc) {
          patch.push_back(gray[static_cast<std::size_t>(r) * w + cc]);
        }
      }
      double mean = 0.0;
      for (double v : patch) {
        mean += v;
      }
      mean /= static_cast<double>(patch.size());
      double var = 0.0;
      for (double v : patch) {
        var += (v - mean) * (v - mean);
      }
      var /= static_cast<double>(patch.size());

      double gx = 0.0, gy = 0.0;
      std::size_t nx = 0, ny = 0;
      for (int r = r0; r < r1; ++r) {
        for (int cc = c0; cc + 1 < c1; ++cc) {
          gx += gray[static_cast<std::size_t>(r) * w + cc + 1] -
                gray[static_cast<std::size_t>(r) * w + cc];
          ++nx;
        }
      }
      for (int r = r0; r + 1 < r1; ++r) {
        for (int cc = c0; cc < c1; ++cc) {
          gy += gray[static_cast<std::size_t>(r + 1) * w + cc] -
                gray[static_cast<std::size_t>(r) * w + cc];
          ++ny;
        }
      }
      feats.push_back({mean, std::sqrt(var), nx ? gx / static_cast<double>(nx) : 0.0,
                       ny ? gy / static_cast<double>(ny) : 0.0});
    }
  }
  return feats;
}

inline double lpips_naive(const std::vector<std::vector<double>>& fa,
                          const std::vector<std::vector<double>>& fb) {
  double total = 0.0;
  for (std::size_t i = 0; i < fa.size(); ++i) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < fa[i].size(); ++j) {
      d2 += (fa[i][j] - fb[i][j]) * (fa[i][j] - fb[i][j]);
    }
    total += std::sqrt(d2);
  }
  return total / static_cast<double>(fa.size());
}

inline double lmd_naive(const std::vector<double>& ax, const std::vector<double>& ay,
                        const std::vector<double>& bx, const std::vector<double>& by) {
  double total = 0.0;
  for (std::size_t i = 0; i < ax.size(); ++i) {
    total += std::hypot(ax[i] - bx[i], ay[i] - by[i]);
  }
  return total / static_cast<double>(ax.size());
}

inline double aue_naive(const std::vector<double>& a, const std::vector<double>& b) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    total += (a[i] - b[i]) * (a[i] - b[i]);
  }
  return total / static_cast<double>(a.size());
}

inline double sync_naive(const std::vector<std::vector<double>>& v,
                         const std::vector<std::vector<double>>& s, double eps = 1e-8) {
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double dot = 0.0, nv = 0.0, ns = 0.0;
    for (std::size_t j = 0; j < v[i].size(); ++j) {
      dot += v[i][j] * s[i][j];
      nv += v[i][j] * v[i][j];
      ns += s[i][j] * s[i][j];
    }
    double cosv = dot / std::max(std::sqrt(nv) * std::sqrt(ns), eps);
    cosv = std::min(1.0, std::max(-1.0, cosv));
    total += cosv;
  }
  return total / static_cast<double>(v.size());
}

/// FID between diagonal Gaussians:
/// sum (mu_r - mu_g)^2 + sum (v_r + v_g - 2 sqrt(v_r v_g)).
inline double fid_diagonal(const std::vector<double>& mu_r, const std::vector<double>& mu_g,
                           const std::vector<double>& var_r, const std::vector<double>& var_g) {
  double total = 0.0;
  for (std::size_t i = 0; i < mu_r.size(); ++i) {
    total += (mu_r[i] - mu_g[i]) * (mu_r[i] - mu_g[i]);
    total += var_r[i] + var_g[i] - 2.0 * std::sqrt(var_r[i] * var_g[i]);
  }
  return total;
}

/// Sample mean and (n-1) covariance the long way.
inline void moments_naive(const std::vector<double>& rows, std::size_t n, int d,
                          std::vector<double>& mean, std::vector<double>& cov) {
  mean.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) {
      mean[j] += rows[i * d + j];
    }
  }
  for (double& m : mean) {
    m /= static_cast<double>(n);
  }
  cov.assign(static_cast<std::size_t>(d) * d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        cov[static_cast<std::size_t>(j) * d + k] +=
            (rows[i * d + j] - mean[j]) * (rows[i * d + k] - mean[k]);
      }
    }
  }
  for (double& c : cov) {
    c /= static_cast<double>(n - 1);
  }
}

// --------------------------------------------------------------------------
// Linear algebra helpers (for the sqrtm property check)
// --------------------------------------------------------------------------

inline std::vector<double> matmul(const std::vector<double>& a, const std::vector<double>& b,
                                  int d) {
  std::vector<double> c(static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) {
      const double aik = a[static_cast<std::size_t>(i) * d + k];
      for (int j = 0; j < d; ++j) {
        c[static_cast<std::size_t>(i) * d + j] += aik * b[static_cast<std::size_t>(k) * d + j];
      }
    }
  }
  return c;
}

inline double frobenius(const std::vector<double>& a) {
  double acc = 0.0;
  for (double v : a) {
    acc += v * v;
  }
  return std::sqrt(acc);
}

inline std::vector<double> mat_diff(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    c[i] = a[i] - b[i];
  }
  return c;
}

/// Random symmetric positive definite matrix: A^T A + d * I.
template <typename RngT>
std::vector<double> random_spd(RngT& rng, int d, double jitter = 0.5) {
  std::vector<double> a(static_cast<std::size_t>(d) * d);
  for (double& v : a) {
    v = rng.uniform(-1.0, 1.0);
  }
  std::vector<double> at(a.size());
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      at[static_cast<std::size_t>(i) * d + j] = a[static_cast<std::size_t>(j) * d + i];
    }
  }
  std::vector<double> spd = matmul(at, a, d);
  for (int i = 0; i < d; ++i) {
    spd[static_cast<std::size_t>(i) * d + i] += jitter;
  }
  return spd;
}

}  // namespace oracle
