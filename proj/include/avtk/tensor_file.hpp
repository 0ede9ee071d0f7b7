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
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace avtk {

/// Tensor interchange file: a one-line JSON header followed by a newline and
/// a raw little-endian float32 payload in row-major order.
///
/// The header always carries {"shape":[...],"dtype":"f32","kind":"<kind>"};
/// producers may add extra fields (e.g. "rate_hz" for embeddings, "fps" for
/// aligned tensors). Round-trips are bit-exact.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<float> data;  // row-major, shape product elements
  std::string kind;
  nlohmann::ordered_json extra;  // header fields beyond shape/dtype/kind

  std::size_t size() const {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return shape.empty() ? 0 : n;
  }
};

Tensor read_tensor(std::istream& in);
Tensor read_tensor(const std::string& path);

void write_tensor(const Tensor& t, std::ostream& out);
void write_tensor(const Tensor& t, const std::string& path);

}  // namespace avtk
