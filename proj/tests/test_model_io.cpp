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
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <vector>

#include "epicolor/errors.hpp"
#include "gtest/gtest.h"

namespace epicolor {
namespace {

namespace fs = std::filesystem;

DualEpitome random_model(std::uint64_t seed, int rows, int cols, int k, int grid) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1, 1), phi(1e-4, 3);
  DualEpitome m;
  m.yiq = Epitome(rows, cols, 3);
  m.dsift = DescriptorEpitome(rows * cols, 8 * grid * grid);
  for (double& v : m.yiq.mu) v = u(gen);
  for (double& v : m.yiq.phi) v = phi(gen);
  for (double& v : m.dsift.mu) v = u(gen);
  for (double& v : m.dsift.phi) v = phi(gen);
  std::vector<double> pi(rows * cols);
  for (double& v : pi) v = phi(gen);
  m.prior = MappingPrior::from_probabilities(pi);
  m.patch_size = k;
  m.descriptor_grid = grid;
  m.lambda = 0.5 + 0.5 * u(gen);
  return m;
}

std::uint32_t read_u32(const std::vector<std::uint8_t>& b, std::size_t off) {
  return b[off] | b[off + 1] << 8 | b[off + 2] << 16 | static_cast<std::uint32_t>(b[off + 3]) << 24;
}

void write_u32(std::vector<std::uint8_t>& b, std::size_t off, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b[off + i] = static_cast<std::uint8_t>(v >> (8 * i));
}

double read_f64(const std::vector<std::uint8_t>& b, std::size_t off) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[off + i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

TEST(ModelFormat, HeaderLayoutIsLittleEndian) {
  const auto m = random_model(1, 3, 5, 6, 2);
  const auto b = serialize_model(m);
  EXPECT_EQ(std::memcmp(b.data(), "EPTM", 4), 0);
  EXPECT_EQ(read_u32(b, 4), 1u);
  EXPECT_EQ(read_u32(b, 8), 3u);
  EXPECT_EQ(read_u32(b, 12), 5u);
  EXPECT_EQ(read_u32(b, 16), 3u);
  EXPECT_EQ(read_u32(b, 20), 6u);
  EXPECT_EQ(read_u32(b, 24), 2u);
  EXPECT_EQ(read_u32(b, 28), 15u);
  EXPECT_EQ(read_f64(b, 32), m.lambda);
  const std::size_t reals = 2 * 15 * 3 + 2 * 15 * 32 + 15;
  EXPECT_EQ(b.size(), kModelHeaderBytes + 8 * reals);
  // Payload order: yiq mu, yiq phi, desc mu, desc phi, log_pi.
  EXPECT_EQ(read_f64(b, 40), m.yiq.mu[0]);
  EXPECT_EQ(read_f64(b, 40 + 8 * 45), m.yiq.phi[0]);
  EXPECT_EQ(read_f64(b, 40 + 8 * 90), m.dsift.mu[0]);
  EXPECT_EQ(read_f64(b, 40 + 8 * (90 + 480)), m.dsift.phi[0]);
  EXPECT_EQ(read_f64(b, b.size() - 8), m.prior.log_pi.back());
}

TEST(ModelFormat, RoundTripIsBitExact) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto m = random_model(seed, 1 + seed % 5, 1 + seed % 7, 2 + seed % 10, 1);
    const auto bytes = serialize_model(m);
    const auto back = deserialize_model(bytes);
    EXPECT_EQ(back, m);
    EXPECT_EQ(serialize_model(back), bytes);
  }
}

TEST(ModelFormat, SaveLoadThroughFilesystem) {
  const auto m = random_model(7, 4, 4, 8, 3);
  const auto path = fs::temp_directory_path() / "epicolor_test_model.eptm";
  save_model(m, path);
  EXPECT_EQ(load_model(path), m);
  fs::remove(path);
}

TEST(ModelFormat, BadMagic) {
  auto b = serialize_model(random_model(2, 2, 2, 2, 1));
  b[0] = 'X';
  EXPECT_THROW(deserialize_model(b), CorruptModel);
}

TEST(ModelFormat, BadVersion) {
  auto b = serialize_model(random_model(2, 2, 2, 2, 1));
  write_u32(b, 4, 2);
  EXPECT_THROW(deserialize_model(b), CorruptModel);
}

TEST(ModelFormat, InconsistentDimensions) {
  const auto good = serialize_model(random_model(2, 2, 3, 2, 1));
  auto b = good;
  write_u32(b, 28, 7);  // L != rows * cols
  EXPECT_THROW(deserialize_model(b), CorruptModel);
  b = good;
  write_u32(b, 8, 0);
  EXPECT_THROW(deserialize_model(b), CorruptModel);
  b = good;
  write_u32(b, 16, 1);
  EXPECT_THROW(deserialize_model(b), CorruptModel);
  b = good;
  write_u32(b, 24, 2);  // K = 2 < 2R
  EXPECT_THROW(deserialize_model(b), CorruptModel);
  b = good;
  write_u32(b, 8, 0xffffffffu);
  EXPECT_THROW(deserialize_model(b), CorruptModel);
}

TEST(ModelFormat, TruncatedAndOversized) {
  const auto good = serialize_model(random_model(3, 2, 2, 2, 1));
  EXPECT_THROW(deserialize_model(std::span(good).first(good.size() - 1)), CorruptModel);
  EXPECT_THROW(deserialize_model(std::span(good).first(20)), CorruptModel);
  auto longer = good;
  longer.push_back(0);
  EXPECT_THROW(deserialize_model(longer), CorruptModel);
  EXPECT_THROW(deserialize_model(std::vector<std::uint8_t>{}), CorruptModel);
}

void write_f64(std::vector<std::uint8_t>& b, std::size_t off, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) b[off + i] = static_cast<std::uint8_t>(bits >> (8 * i));
}

TEST(ModelFormat, InvalidValues) {
  // 2x2 epitome, R = 1: yiq mu at 40, yiq phi at 40 + 8 * 12, log_pi last.
  const auto good = serialize_model(random_model(4, 2, 2, 2, 1));
  auto b = good;
  write_f64(b, 40 + 8 * 12, -1.0);
  EXPECT_THROW(deserialize_model(b), CorruptModel);
  b = good;
  write_f64(b, b.size() - 8, std::numeric_limits<double>::quiet_NaN());
  EXPECT_THROW(deserialize_model(b), CorruptModel);
  b = good;
  write_f64(b, 32, 3.0);
  EXPECT_THROW(deserialize_model(b), CorruptModel);
  b = good;
  write_f64(b, 40, std::numeric_limits<double>::infinity());
  EXPECT_THROW(deserialize_model(b), CorruptModel);
}

TEST(ModelFormat, SerializeRejectsInvalidModel) {
  auto m = random_model(4, 2, 2, 2, 1);
  m.yiq.phi[0] = 0.0;
  EXPECT_THROW(serialize_model(m), InvalidInput);
}

TEST(ModelFormat, FilesystemErrorsAreIoErrors) {
  EXPECT_THROW(load_model("/nonexistent/dir/model.eptm"), IoError);
  EXPECT_THROW(save_model(random_model(5, 2, 2, 2, 1), "/nonexistent/dir/model.eptm"), IoError);
}

}  // namespace
}  // namespace epicolor
