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

#include <string>
#include <vector>

namespace avtk {

/// A single video frame, (H, W, channels) row-major, values in [0, max_value].
struct ImageFrame {
  std::vector<float> pixels;
  int height = 0;
  int width = 0;
  int channels = 1;  // 1 (gray) or 3 (RGB)
  double max_value = 255.0;

  float at(int r, int c, int ch = 0) const {
    return pixels[(static_cast<std::size_t>(r) * width + c) * channels + ch];
  }
  float& at(int r, int c, int ch = 0) {
    return pixels[(static_cast<std::size_t>(r) * width + c) * channels + ch];
  }
};

/// ITU-R 601 luma: 0.299 R + 0.587 G + 0.114 B. Gray input passes through.
std::vector<double> to_gray(const ImageFrame& img);

/// Load a binary PGM (P5) or PPM (P6) image, or a tensor interchange file of
/// kind "img" with shape [H, W, C] (optional header field "max", default 255).
ImageFrame load_image(const std::string& path);

/// Write binary PGM (1 channel) / PPM (3 channels); max_value must be <= 255.
void save_image(const ImageFrame& img, const std::string& path);

}  // namespace avtk
