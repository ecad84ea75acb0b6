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

#include "epicolor/dsift.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "epicolor/errors.hpp"
#include "parallel.hpp"

namespace epicolor {

namespace {

void check_patch(const RasterImage& patch, int grid) {
  if (patch.channels() != 1) {
    throw InvalidInput("descriptor needs a single-channel luminance patch");
  }
  if (patch.width() != patch.height()) {
    throw InvalidInput("descriptor needs a square patch");
  }
  if (grid < 1 || patch.width() < 2 * grid) {
    throw InvalidInput("descriptor grid " + std::to_string(grid) +
                       " needs patch size >= " + std::to_string(2 * grid) +
                       ", got " + std::to_string(patch.width()));
  }
}

// Central difference in the interior, forward/backward on the two borders.
double difference(const RasterImage& p, int r, int c, bool along_rows) {
  const int n = along_rows ? p.height() : p.width();
  const int i = along_rows ? r : c;
  auto v = [&](int j) { return along_rows ? p.at(j, c) : p.at(r, j); };
  if (i == 0) return v(1) - v(0);
  if (i == n - 1) return v(n - 1) - v(n - 2);
  return 0.5 * (v(i + 1) - v(i - 1));
}

int orientation_bin(double gy, double gx) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double theta = std::atan2(gy, gx);
  if (theta < 0.0) theta += kTwoPi;
  const int bin = static_cast<int>(theta / (kTwoPi / kOrientationBins));
  // theta can round up to exactly 2pi for tiny negative angles.
  return bin >= kOrientationBins ? 0 : bin;
}

}  // namespace

std::vector<double> raw_orientation_histogram(const RasterImage& patch, int grid) {
  check_patch(patch, grid);
  const int k = patch.width();
  std::vector<double> hist(descriptor_length(grid), 0.0);
  for (int cell_r = 0; cell_r < grid; ++cell_r) {
    const int r0 = cell_r * k / grid;
    const int r1 = (cell_r + 1) * k / grid;
    for (int cell_c = 0; cell_c < grid; ++cell_c) {
      const int c0 = cell_c * k / grid;
      const int c1 = (cell_c + 1) * k / grid;
      double* cell = &hist[(cell_r * grid + cell_c) * kOrientationBins];
      for (int r = r0; r < r1; ++r) {
        for (int c = c0; c < c1; ++c) {
          const double gx = difference(patch, r, c, false);
          const double gy = difference(patch, r, c, true);
          const double magnitude = std::hypot(gx, gy);
          if (magnitude > 0.0) cell[orientation_bin(gy, gx)] += magnitude;
        }
      }
    }
  }
  return hist;
}

PatchDescriptor patch_descriptor(const RasterImage& patch, int grid) {
  PatchDescriptor d{raw_orientation_histogram(patch, grid), grid};
  double norm2 = 0.0;
  for (double v : d.values) norm2 += v * v;
  const double scale = 1.0 / std::max(std::sqrt(norm2), kDescriptorNormEpsilon);
  for (double& v : d.values) v *= scale;
  return d;
}

std::vector<PatchDescriptor> descriptor_image(const RasterImage& luminance,
                                              const PatchGrid& grid,
                                              int descriptor_grid,
                                              unsigned threads) {
  std::vector<PatchDescriptor> out(grid.count());
  detail::parallel_for(grid.count(), threads, [&](std::size_t k) {
    out[k] = patch_descriptor(
        extract_patch(luminance, grid.anchors[k], grid.patch_size),
        descriptor_grid);
  });
  return out;
}

}  // namespace epicolor
