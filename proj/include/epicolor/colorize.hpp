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

#include <span>
#include <vector>

#include "epicolor/dsift.hpp"
#include "epicolor/image.hpp"
#include "epicolor/likelihood.hpp"
#include "epicolor/model.hpp"
#include "epicolor/patches.hpp"

namespace epicolor {

// Index of the largest score; the lowest index wins ties.
int argmax_lowest(std::span<const double> scores);

// Scores target patches against a trained model using luminance and
// descriptor only: log_pi + lambda * ll_Y + (1 - lambda) * ll_desc.
class MappingInference {
 public:
  explicit MappingInference(const DualEpitome& model);

  std::vector<double> scores(const RasterImage& patch_y,
                             const PatchDescriptor& descriptor) const;
  int best_mapping(const RasterImage& patch_y,
                   const PatchDescriptor& descriptor) const;

 private:
  std::vector<double> log_pi_;
  double lambda_;
  PatchScorer luminance_;
  DescriptorScorer descriptor_;
};

int best_mapping(const RasterImage& patch_y, const PatchDescriptor& descriptor,
                 const DualEpitome& model);

// Sums the epitome's I and Q under every patch placement and averages by the
// number of patches covering each pixel. Y is copied from target_y. Throws
// InternalError if some pixel is not covered by the grid.
RasterImage transfer_chroma(const RasterImage& target_y, const PatchGrid& grid,
                            std::span<const int> mappings,
                            const DualEpitome& model);

// Affine map of target luminance onto the mean and standard deviation of the
// luminance the epitome models (mixture moments over all locations).
RasterImage remap_luminance(const RasterImage& target_y, const Epitome& epitome);

struct ColorizeOptions {
  double omega = 0.25;
  bool luma_remap = false;
  unsigned threads = 0;
};

// Full inference; returns YIQ with the target's own luminance.
RasterImage colorize_yiq(const RasterImage& target_gray, const DualEpitome& model,
                         const ColorizeOptions& options = {});

// colorize_yiq followed by conversion to RGB clamped to [0, 1].
RasterImage colorize(const RasterImage& target_gray, const DualEpitome& model,
                     const ColorizeOptions& options = {});

}  // namespace epicolor
