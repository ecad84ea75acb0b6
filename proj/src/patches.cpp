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

#include "epicolor/patches.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "epicolor/errors.hpp"

namespace epicolor {

std::vector<int> axis_positions(int dim, int patch_size, double omega) {
  if (patch_size < 1) throw InvalidInput("patch size must be >= 1");
  if (!(omega > 0.0 && omega <= 1.0)) {
    throw InvalidInput("omega must lie in (0, 1]");
  }
  if (patch_size > dim) {
    throw InvalidInput("patch size " + std::to_string(patch_size) +
                       " exceeds image dimension " + std::to_string(dim));
  }
  const int gap = std::max(1, static_cast<int>(std::lround(omega * patch_size)));
  const int last = dim - patch_size;
  std::vector<int> positions;
  for (int p = 0; p <= last; p += gap) positions.push_back(p);
  if (positions.back() != last) positions.push_back(last);
  return positions;
}

PatchGrid sample_grid(int width, int height, int patch_size, double omega) {
  const auto rows = axis_positions(height, patch_size, omega);
  const auto cols = axis_positions(width, patch_size, omega);
  PatchGrid grid;
  grid.patch_size = patch_size;
  grid.anchors.reserve(rows.size() * cols.size());
  for (int r : rows)
    for (int c : cols) grid.anchors.push_back({r, c});
  return grid;
}

RasterImage extract_patch(const RasterImage& img, Anchor anchor, int patch_size) {
  if (patch_size < 1 || anchor.row < 0 || anchor.col < 0 ||
      anchor.row + patch_size > img.height() ||
      anchor.col + patch_size > img.width()) {
    throw InvalidInput("patch at (" + std::to_string(anchor.row) + ", " +
                       std::to_string(anchor.col) + ") of size " +
                       std::to_string(patch_size) + " leaves the image");
  }
  const int ch = img.channels();
  RasterImage out(patch_size, patch_size, ch, img.semantics());
  auto dst = out.data().begin();
  for (int r = 0; r < patch_size; ++r) {
    const double* src =
        img.data().data() +
        (static_cast<std::size_t>(anchor.row + r) * img.width() + anchor.col) * ch;
    dst = std::copy(src, src + static_cast<std::ptrdiff_t>(patch_size) * ch, dst);
  }
  return out;
}

}  // namespace epicolor
