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

#include "avtk/tensor_file.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "avtk/errors.hpp"

namespace avtk {

namespace {

// The payload is raw float32; serialize through an explicit little-endian
// byte layout so files round-trip bit-exactly regardless of host order.
void pack_le(const std::vector<float>& values, std::vector<unsigned char>& bytes) {
  bytes.resize(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t u;
    std::memcpy(&u, &values[i], 4);
    bytes[4 * i + 0] = static_cast<unsigned char>(u & 0xff);
    bytes[4 * i + 1] = static_cast<unsigned char>((u >> 8) & 0xff);
    bytes[4 * i + 2] = static_cast<unsigned char>((u >> 16) & 0xff);
    bytes[4 * i + 3] = static_cast<unsigned char>((u >> 24) & 0xff);
  }
}

void unpack_le(const std::vector<unsigned char>& bytes, std::vector<float>& values) {
  values.resize(bytes.size() / 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t u = static_cast<std::uint32_t>(bytes[4 * i + 0]) |
                      (static_cast<std::uint32_t>(bytes[4 * i + 1]) << 8) |
                      (static_cast<std::uint32_t>(bytes[4 * i + 2]) << 16) |
                      (static_cast<std::uint32_t>(bytes[4 * i + 3]) << 24);
    std::memcpy(&values[i], &u, 4);
  }
}

}  // namespace

Tensor read_tensor(std::istream& in) {
  std::string header_line;
  if (!std::getline(in, header_line)) {
    throw FormatError("tensor file: missing header line");
  }

  nlohmann::ordered_json header;
  try {
    header = nlohmann::ordered_json::parse(header_line);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("tensor file: header is not valid JSON: ") + e.what());
  }
  if (!header.is_object()) {
    throw FormatError("tensor file: header must be a JSON object");
  }
  if (!header.contains("shape") || !header["shape"].is_array()) {
    throw FormatError("tensor file: header missing \"shape\" array");
  }
  if (!header.contains("dtype") || header["dtype"] != "f32") {
    throw FormatError("tensor file: only dtype \"f32\" is supported");
  }
  if (!header.contains("kind") || !header["kind"].is_string()) {
    throw FormatError("tensor file: header missing \"kind\"");
  }

  Tensor t;
  t.kind = header["kind"].get<std::string>();
  for (const auto& dim : header["shape"]) {
    if (!dim.is_number_integer() || dim.get<std::int64_t>() < 0) {
      throw FormatError("tensor file: shape entries must be non-negative integers");
    }
    t.shape.push_back(dim.get<std::size_t>());
  }
  for (auto it = header.begin(); it != header.end(); ++it) {
    if (it.key() != "shape" && it.key() != "dtype" && it.key() != "kind") {
      t.extra[it.key()] = it.value();
    }
  }

  const std::size_t n = t.size();
  if (n > std::numeric_limits<std::size_t>::max() / 4) {
    throw FormatError("tensor file: shape overflows payload size");
  }
  std::vector<unsigned char> bytes(n * 4);
  if (n > 0) {
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (static_cast<std::size_t>(in.gcount()) != bytes.size()) {
      throw FormatError("tensor file: payload shorter than header shape implies");
    }
  }
  unpack_le(bytes, t.data);
  return t;
}

Tensor read_tensor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open tensor file: " + path);
  }
  return read_tensor(in);
}

void write_tensor(const Tensor& t, std::ostream& out) {
  if (t.data.size() != t.size()) {
    throw ContractError("tensor write: data length does not match shape product");
  }

  nlohmann::ordered_json header;
  header["shape"] = t.shape;
  header["dtype"] = "f32";
  header["kind"] = t.kind;
  for (auto it = t.extra.begin(); it != t.extra.end(); ++it) {
    header[it.key()] = it.value();
  }

  out << header.dump() << '\n';
  std::vector<unsigned char> bytes;
  pack_le(t.data, bytes);
  if (!bytes.empty()) {
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
  }
  if (!out) {
    throw IoError("tensor write: stream failure");
  }
}

void write_tensor(const Tensor& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot create tensor file: " + path);
  }
  write_tensor(t, out);
}

}  // namespace avtk
