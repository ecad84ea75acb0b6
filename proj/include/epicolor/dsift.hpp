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

#pragma once

#include <vector>

#include "epicolor/image.hpp"
#include "epicolor/patches.hpp"

namespace epicolor {

inline constexpr int kOrientationBins = 8;
inline constexpr double kDescriptorNormEpsilon = 1e-12;

// R x R cells of 8-bin gradient-orientation histograms, concatenated cell by
// cell in row-major order (length 8 * R * R, all entries >= 0).
struct PatchDescriptor {
  std::vector<double> values;
  int grid = 0;
};

inline int descriptor_length(int grid) { return kOrientationBins * grid * grid; }

// Histogram before L2 normalization. Each pixel votes its gradient magnitude
// into the bin [b*pi/4, (b+1)*pi/4) holding atan2(gy, gx) mapped to [0, 2pi).
// Gradients are central differences, one-sided on the patch border.
std::vector<double> raw_orientation_histogram(const RasterImage& patch, int grid);

// Requires a single-channel square patch with K >= 2R.
PatchDescriptor patch_descriptor(const RasterImage& patch, int grid);

// One descriptor per grid anchor, same order. `threads` = 0 uses all cores.
std::vector<PatchDescriptor> descriptor_image(const RasterImage& luminance,
                                              const PatchGrid& grid,
                                              int descriptor_grid,
                                              unsigned threads = 1);

}  // namespace epicolor
