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

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "epicolor/dsift.hpp"
#include "epicolor/errors.hpp"
#include "gtest/gtest.h"

namespace epicolor {
namespace {

RasterImage random_patch(std::mt19937_64& gen, int k) {
  std::uniform_real_distribution<double> u(0, 1);
  RasterImage p(k, k, 1, ChannelSemantics::kY);
  for (double& v : p.data()) v = u(gen);
  return p;
}

// Values on the 1/1024 lattice so that shifts by lattice constants are exact.
RasterImage dyadic_patch(std::mt19937_64& gen, int k) {
  std::uniform_int_distribution<int> u(0, 1024);
  RasterImage p(k, k, 1, ChannelSemantics::kY);
  for (double& v : p.data()) v = u(gen) / 1024.0;
  return p;
}

RasterImage shifted(RasterImage p, double c) {
  for (double& v : p.data()) v += c;
  return p;
}

RasterImage scaled(RasterImage p, double a) {
  for (double& v : p.data()) v *= a;
  return p;
}

TEST(Descriptor, LengthIsEightRSquared) {
  std::mt19937_64 gen(1);
  for (int r : {1, 2, 3, 4}) {
    EXPECT_EQ(patch_descriptor(random_patch(gen, 12), r).values.size(),
              static_cast<std::size_t>(8 * r * r));
  }
}

TEST(Descriptor, ConstantPatchIsZero) {
  RasterImage p(9, 9, 1, ChannelSemantics::kY);
  for (double& v : p.data()) v = 0.37;
  for (double v : patch_descriptor(p, 3).values) EXPECT_EQ(v, 0.0);
}

// 6x6 patch, R=1, columns 0-2 are 0 and 3-5 are 1. Hand enumeration of the
// 36 votes: gy = 0 everywhere; gx = 0.5 at columns 2 and 3 (central
// differences straddling the edge) and 0 elsewhere, including both
// one-sided border columns. Twelve votes of 0.5 at angle 0 land in bin 0.
TEST(Descriptor, VerticalStepEdgeHandOracle) {
  RasterImage p(6, 6, 1, ChannelSemantics::kY);
  for (int r = 0; r < 6; ++r)
    for (int c = 3; c < 6; ++c) p.at(r, c) = 1.0;
  const auto raw = raw_orientation_histogram(p, 1);
  std::vector<double> expect(8, 0.0);
  expect[0] = 12 * 0.5;
  EXPECT_EQ(raw, expect);
  const auto d = patch_descriptor(p, 1);
  EXPECT_EQ(d.values[0], 1.0);
  for (int b = 1; b < 8; ++b) EXPECT_EQ(d.values[b], 0.0);
}

TEST(Descriptor, FallingEdgeVotesIntoOppositeBin) {
  RasterImage p(6, 6, 1, ChannelSemantics::kY);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 3; ++c) p.at(r, c) = 1.0;
  const auto raw = raw_orientation_histogram(p, 1);
  EXPECT_EQ(raw[4], 6.0);
  EXPECT_EQ(std::accumulate(raw.begin(), raw.end(), 0.0), 6.0);
}

TEST(Descriptor, HorizontalEdgeUsesRowsAndCellSplit) {
  // 4x4, R=2: rows 0-1 are 0, rows 2-3 are 1. gy = 0.5 on rows 1 and 2
  // (angle pi/2, bin 2); the top cells see row 1, the bottom cells row 2.
  RasterImage p(4, 4, 1, ChannelSemantics::kY);
  for (int r = 2; r < 4; ++r)
    for (int c = 0; c < 4; ++c) p.at(r, c) = 1.0;
  const auto raw = raw_orientation_histogram(p, 2);
  for (int cell = 0; cell < 4; ++cell)
    for (int b = 0; b < 8; ++b) EXPECT_EQ(raw[cell * 8 + b], b == 2 ? 1.0 : 0.0);
}

TEST(Descriptor, DiagonalGradientBinBoundary) {
  // Plane z = r + c: gx = gy = 1 everywhere, angle exactly pi/4 -> bin 1.
  RasterImage p(4, 4, 1, ChannelSemantics::kY);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) p.at(r, c) = r + c;
  const auto raw = raw_orientation_histogram(p, 1);
  EXPECT_NEAR(raw[1], 16 * std::sqrt(2.0), 1e-12);
  EXPECT_EQ(std::accumulate(raw.begin(), raw.end(), 0.0), raw[1]);
}

TEST(Descriptor, RejectsBadInputs) {
  EXPECT_THROW(patch_descriptor(RasterImage(5, 5, 1, ChannelSemantics::kY), 3), InvalidInput);
  EXPECT_THROW(patch_descriptor(RasterImage(6, 5, 1, ChannelSemantics::kY), 1), InvalidInput);
  EXPECT_THROW(patch_descriptor(RasterImage(6, 6, 3, ChannelSemantics::kYIQ), 1), InvalidInput);
  EXPECT_THROW(patch_descriptor(RasterImage(6, 6, 1, ChannelSemantics::kY), 0), InvalidInput);
  EXPECT_NO_THROW(patch_descriptor(RasterImage(6, 6, 1, ChannelSemantics::kY), 3));
}

TEST(DescriptorProperty, BrightnessShiftExactOnDyadicValues) {
  std::mt19937_64 gen(2);
  std::uniform_int_distribution<int> shift(-512, 512);
  for (int n = 0; n < 100; ++n) {
    const auto p = dyadic_patch(gen, 12);
    const double c = shift(gen) / 1024.0;
    EXPECT_EQ(patch_descriptor(shifted(p, c), 3).values, patch_descriptor(p, 3).values);
  }
}

TEST(DescriptorProperty, BrightnessShiftByTenthWithinRounding) {
  std::mt19937_64 gen(3);
  for (int n = 0; n < 100; ++n) {
    const auto p = random_patch(gen, 12);
    const auto a = patch_descriptor(p, 3).values;
    const auto b = patch_descriptor(shifted(p, 0.1), 3).values;
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
  }
}

TEST(DescriptorProperty, ContrastCovarianceAndInvariance) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> scale(0.05, 20.0);
  for (int n = 0; n < 100; ++n) {
    const auto p = random_patch(gen, 12);
    const double a = scale(gen);
    const auto raw = raw_orientation_histogram(p, 3);
    const auto raw_a = raw_orientation_histogram(scaled(p, a), 3);
    for (std::size_t i = 0; i < raw.size(); ++i) EXPECT_NEAR(raw_a[i], a * raw[i], 1e-12 * a * (1 + raw[i]));
    const auto d = patch_descriptor(p, 3).values;
    const auto d_a = patch_descriptor(scaled(p, a), 3).values;
    for (std::size_t i = 0; i < d.size(); ++i) EXPECT_NEAR(d_a[i], d[i], 1e-12);
  }
}

TEST(DescriptorProperty, RawMassEqualsTotalGradientMagnitude) {
  std::mt19937_64 gen(5);
  for (int n = 0; n < 50; ++n) {
    const int k = 6 + n % 7;
    const auto p = random_patch(gen, k);
    double total = 0.0;
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) {
        const double gx = c == 0       ? p.at(r, 1) - p.at(r, 0)
                          : c == k - 1 ? p.at(r, k - 1) - p.at(r, k - 2)
                                       : 0.5 * (p.at(r, c + 1) - p.at(r, c - 1));
        const double gy = r == 0       ? p.at(1, c) - p.at(0, c)
                          : r == k - 1 ? p.at(k - 1, c) - p.at(k - 2, c)
                                       : 0.5 * (p.at(r + 1, c) - p.at(r - 1, c));
        total += std::sqrt(gx * gx + gy * gy);
      }
    const auto raw = raw_orientation_histogram(p, 3);
    EXPECT_NEAR(std::accumulate(raw.begin(), raw.end(), 0.0), total, 1e-10);
    for (double v : raw) EXPECT_GE(v, 0.0);
  }
}

TEST(DescriptorProperty, UnitNormOnNonConstantPatches) {
  std::mt19937_64 gen(6);
  for (int n = 0; n < 50; ++n) {
    const auto d = patch_descriptor(random_patch(gen, 8), 2).values;
    double s = 0.0;
    for (double v : d) s += v * v;
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(DescriptorImage, SingleAnchorMatchesPatchDescriptor) {
  std::mt19937_64 gen(7);
  const auto img = random_patch(gen, 12);
  const auto out = descriptor_image(img, sample_grid(12, 12, 12, 0.5), 3);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].values, patch_descriptor(img, 3).values);
}

TEST(DescriptorImage, ConstantImageGivesZeros) {
  RasterImage img(20, 16, 1, ChannelSemantics::kY);
  for (double& v : img.data()) v = 0.6;
  for (const auto& d : descriptor_image(img, sample_grid(20, 16, 8, 0.5), 2))
    for (double v : d.values) EXPECT_EQ(v, 0.0);
}

TEST(DescriptorImage, RampGivesIdenticalDescriptors) {
  RasterImage img(24, 24, 1, ChannelSemantics::kY);
  for (int r = 0; r < 24; ++r)
    for (int c = 0; c < 24; ++c) img.at(r, c) = 0.01 * r + 0.02 * c;
  const auto grid = sample_grid(24, 24, 12, 0.5);
  ASSERT_EQ(grid.count(), 9u);
  const auto out = descriptor_image(img, grid, 3);
  // Direct computation on the first patch.
  RasterImage first(12, 12, 1, ChannelSemantics::kY);
  for (int r = 0; r < 12; ++r)
    for (int c = 0; c < 12; ++c) first.at(r, c) = img.at(r, c);
  const auto expect = patch_descriptor(first, 3).values;
  for (const auto& d : out)
    for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_NEAR(d.values[i], expect[i], 1e-12);
}

TEST(DescriptorImage, ThreadCountDoesNotChangeResult) {
  std::mt19937_64 gen(8);
  const auto img = random_patch(gen, 30);
  const auto grid = sample_grid(30, 30, 8, 0.25);
  const auto a = descriptor_image(img, grid, 3, 1);
  const auto b = descriptor_image(img, grid, 3, 4);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].values, b[k].values);
}

}  // namespace
}  // namespace epicolor
