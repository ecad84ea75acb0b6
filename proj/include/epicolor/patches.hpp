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

#include <cstddef>
#include <vector>

#include "epicolor/image.hpp"

namespace epicolor {

struct Anchor {
  int row = 0;
  int col = 0;
  friend auto operator<=>(const Anchor&, const Anchor&) = default;
};

// Top-left corners of K x K patches, unique and sorted row-major. The union
// of the patches covers every pixel of the image the grid was built for.
struct PatchGrid {
  std::vector<Anchor> anchors;
  int patch_size = 0;

  std::size_t count() const { return anchors.size(); }
};

// Positions 0, g, 2g, ... <= dim - K with g = max(1, round(omega * K)), plus
// dim - K itself when the stride does not land on it.
std::vector<int> axis_positions(int dim, int patch_size, double omega);

PatchGrid sample_grid(int width, int height, int patch_size, double omega);

// Copies the K x K block at `anchor`; never pads.
RasterImage extract_patch(const RasterImage& img, Anchor anchor, int patch_size);

}  // namespace epicolor
