// Copyright 2026 The epicolor Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "epicolor/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "epicolor/dsift.hpp"
#include "epicolor/errors.hpp"

namespace epicolor {

namespace {

class Writer {
 public:
  explicit Writer(std::size_t reserve) { bytes_.reserve(reserve); }

  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  void f64s(const std::vector<double>& v) {
    for (double x : v) f64(x);
  }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(bits);
  }
  void f64s(std::vector<double>& v) {
    for (double& x : v) x = f64();
  }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw CorruptModel("model file is truncated");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_model(const DualEpitome& model) {
  model.validate();
  const std::size_t reals = model.yiq.mu.size() * 2 + model.dsift.mu.size() * 2 +
                            model.prior.log_pi.size();
  Writer body(kModelHeaderBytes + 8 * reals);
  for (char c : kModelMagic) body.u8(static_cast<std::uint8_t>(c));
  body.u32(kModelVersion);
  body.u32(static_cast<std::uint32_t>(model.yiq.rows));
  body.u32(static_cast<std::uint32_t>(model.yiq.cols));
  body.u32(static_cast<std::uint32_t>(model.yiq.channels));
  body.u32(static_cast<std::uint32_t>(model.patch_size));
  body.u32(static_cast<std::uint32_t>(model.descriptor_grid));
  body.u32(static_cast<std::uint32_t>(model.mappings()));
  body.f64(model.lambda);
  body.f64s(model.yiq.mu);
  body.f64s(model.yiq.phi);
  body.f64s(model.dsift.mu);
  body.f64s(model.dsift.phi);
  body.f64s(model.prior.log_pi);
  return body.take();
}

DualEpitome deserialize_model(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kModelHeaderBytes) throw CorruptModel("model file is truncated");
  if (std::memcmp(bytes.data(), kModelMagic, 4) != 0) {
    throw CorruptModel("bad magic bytes (not an epitome model file)");
  }
  Reader r(bytes.subspan(4));
  const std::uint32_t version = r.u32();
  if (version != kModelVersion) {
    throw CorruptModel("unsupported model version " + std::to_string(version));
  }
  const std::uint32_t rows = r.u32();
  const std::uint32_t cols = r.u32();
  const std::uint32_t channels = r.u32();
  const std::uint32_t patch = r.u32();
  const std::uint32_t grid = r.u32();
  const std::uint32_t mappings = r.u32();
  const double lambda = r.f64();

  constexpr std::uint32_t kMaxSide = 1u << 15;
  if (rows == 0 || cols == 0 || rows > kMaxSide || cols > kMaxSide) {
    throw CorruptModel("epitome dimensions out of range");
  }
  if (static_cast<std::uint64_t>(rows) * cols != mappings) {
    throw CorruptModel("mapping count does not equal rows * cols");
  }
  if (channels != 3) throw CorruptModel("model must have 3 color channels");
  if (grid == 0 || grid > 64 || patch < 2 * grid || patch > kMaxSide) {
    throw CorruptModel("patch size / descriptor grid out of range");
  }
  const std::uint64_t dims = descriptor_length(static_cast<int>(grid));
  const std::uint64_t reals = 2ull * mappings * channels + 2ull * mappings * dims + mappings;
  if (bytes.size() != kModelHeaderBytes + 8 * reals) {
    throw CorruptModel("payload size " + std::to_string(bytes.size()) +
                       " does not match declared dimensions (expected " +
                       std::to_string(kModelHeaderBytes + 8 * reals) + ")");
  }

  DualEpitome model;
  model.yiq = Epitome(static_cast<int>(rows), static_cast<int>(cols), 3);
  model.dsift = DescriptorEpitome(static_cast<int>(mappings), static_cast<int>(dims));
  model.prior.log_pi.resize(mappings);
  model.patch_size = static_cast<int>(patch);
  model.descriptor_grid = static_cast<int>(grid);
  model.lambda = lambda;
  r.f64s(model.yiq.mu);
  r.f64s(model.yiq.phi);
  r.f64s(model.dsift.mu);
  r.f64s(model.dsift.phi);
  r.f64s(model.prior.log_pi);
  try {
    model.validate();
  } catch (const InvalidInput& e) {
    throw CorruptModel(e.what());
  }
  return model;
}

void save_model(const DualEpitome& model, const std::string& path) {
  const auto bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

DualEpitome load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path);
  return deserialize_model(bytes);
}

}  // namespace epicolor
