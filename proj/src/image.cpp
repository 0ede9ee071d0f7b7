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

#include "avtk/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include "avtk/errors.hpp"
#include "avtk/tensor_file.hpp"

namespace avtk {

namespace {

// Netpbm token scanner: skips whitespace and '#' comment lines.
int next_pnm_int(std::istream& in, const char* what) {
  int ch = in.get();
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') {
        ch = in.get();
      }
    } else if (!std::isspace(ch)) {
      break;
    }
    ch = in.get();
  }
  if (ch == EOF || !std::isdigit(ch)) {
    throw FormatError(std::string("PNM header: expected ") + what);
  }
  long value = 0;
  while (ch != EOF && std::isdigit(ch)) {
    value = value * 10 + (ch - '0');
    if (value > 1 << 30) {
      throw FormatError(std::string("PNM header: ") + what + " out of range");
    }
    ch = in.get();
  }
  return static_cast<int>(value);
}

ImageFrame load_pnm(std::ifstream& in, int channels, const std::string& path) {
  ImageFrame img;
  img.channels = channels;
  img.width = next_pnm_int(in, "width");
  img.height = next_pnm_int(in, "height");
  const int maxval = next_pnm_int(in, "maxval");
  if (img.width < 1 || img.height < 1) {
    throw FormatError("PNM header: non-positive dimensions in " + path);
  }
  if (maxval < 1 || maxval > 255) {
    throw UnsupportedError("PNM: only 8-bit images are supported (maxval " +
                           std::to_string(maxval) + ") in " + path);
  }
  img.max_value = maxval;
  // Header ends with exactly one whitespace byte before the raster.

  const std::size_t n = static_cast<std::size_t>(img.width) * img.height * channels;
  std::vector<unsigned char> raster(n);
  in.read(reinterpret_cast<char*>(raster.data()), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw FormatError("PNM raster truncated in " + path);
  }
  img.pixels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    img.pixels[i] = static_cast<float>(raster[i]);
  }
  return img;
}

ImageFrame load_img_tensor(const std::string& path) {
  const Tensor t = read_tensor(path);
  if (t.kind != "img") {
    throw FormatError("image tensor: kind is \"" + t.kind + "\", expected \"img\"");
  }
  if (t.shape.size() != 2 && t.shape.size() != 3) {
    throw FormatError("image tensor: expected shape [H, W] or [H, W, C]");
  }
  ImageFrame img;
  img.height = static_cast<int>(t.shape[0]);
  img.width = static_cast<int>(t.shape[1]);
  img.channels = t.shape.size() == 3 ? static_cast<int>(t.shape[2]) : 1;
  if (img.height < 1 || img.width < 1 || (img.channels != 1 && img.channels != 3)) {
    throw FormatError("image tensor: invalid shape in " + path);
  }
  img.max_value = t.extra.contains("max") ? t.extra["max"].get<double>() : 255.0;
  if (!(img.max_value > 0.0)) {
    throw FormatError("image tensor: \"max\" must be positive in " + path);
  }
  img.pixels = t.data;
  for (float v : img.pixels) {
    if (!std::isfinite(v) || v < 0.0f || v > img.max_value) {
      throw FormatError("image tensor: pixel outside [0, max] in " + path);
    }
  }
  return img;
}

}  // namespace

std::vector<double> to_gray(const ImageFrame& img) {
  std::vector<double> gray(static_cast<std::size_t>(img.height) * img.width);
  if (img.channels == 1) {
    for (std::size_t i = 0; i < gray.size(); ++i) {
      gray[i] = img.pixels[i];
    }
    return gray;
  }
  if (img.channels != 3) {
    throw ContractError("to_gray: channels must be 1 or 3");
  }
  for (std::size_t i = 0; i < gray.size(); ++i) {
    const float* px = &img.pixels[i * 3];
    gray[i] = 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
  }
  return gray;
}

ImageFrame load_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open image file: " + path);
  }
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (in.gcount() == 2 && magic[0] == 'P' && magic[1] == '5') {
    return load_pnm(in, 1, path);
  }
  if (in.gcount() == 2 && magic[0] == 'P' && magic[1] == '6') {
    return load_pnm(in, 3, path);
  }
  in.close();
  return load_img_tensor(path);
}

void save_image(const ImageFrame& img, const std::string& path) {
  if (img.height < 1 || img.width < 1) {
    throw ContractError("save_image: empty image");
  }
  if (img.channels != 1 && img.channels != 3) {
    throw ContractError("save_image: channels must be 1 or 3");
  }
  if (img.max_value > 255.0) {
    throw ContractError("save_image: PNM output is 8-bit; max_value must be <= 255");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot create image file: " + path);
  }
  const int maxval = static_cast<int>(std::lround(img.max_value));
  out << (img.channels == 1 ? "P5" : "P6") << '\n'
      << img.width << ' ' << img.height << '\n'
      << maxval << '\n';
  std::vector<unsigned char> raster(img.pixels.size());
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    const double v = std::clamp(static_cast<double>(img.pixels[i]), 0.0, img.max_value);
    raster[i] = static_cast<unsigned char>(std::lround(v));
  }
  out.write(reinterpret_cast<const char*>(raster.data()),
            static_cast<std::streamsize>(raster.size()));
  if (!out) {
    throw IoError("image write failed: " + path);
  }
}

}  // namespace avtk
