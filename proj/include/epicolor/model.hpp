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
#include <span>
#include <vector>

namespace epicolor {

inline constexpr double kVarianceFloor = 1e-4;
inline constexpr double kPriorFloor = 1e-12;

struct EpitomeCoord {
  int row = 0;
  int col = 0;
  friend bool operator==(const EpitomeCoord&, const EpitomeCoord&) = default;
};

// Mapping l anchors a patch at epitome position (l / cols, l % cols); the
// patch pixel at offset (dr, dc) lands on that position plus the offset,
// wrapped around the torus.
inline EpitomeCoord mapping_coords(int mapping, int dr, int dc, int rows,
                                   int cols) {
  const int u = mapping / cols;
  const int v = mapping % cols;
  return {(u + dr) % rows, (v + dc) % cols};
}

// log N(x; mu, phi) with phi the variance.
double gaussian_log_density(double x, double mu, double phi);

// Per-location Gaussian appearance maps. mu and phi are rows x cols x
// channels, row-major with channels interleaved.
struct Epitome {
  int rows = 0;
  int cols = 0;
  int channels = 0;
  std::vector<double> mu;
  std::vector<double> phi;

  Epitome() = default;
  Epitome(int rows, int cols, int channels);

  int mappings() const { return rows * cols; }
  std::size_t index(int row, int col, int ch) const {
    return (static_cast<std::size_t>(row) * cols + col) * channels + ch;
  }
  double mean(int row, int col, int ch) const { return mu[index(row, col, ch)]; }
  double variance(int row, int col, int ch) const {
    return phi[index(row, col, ch)];
  }

  friend bool operator==(const Epitome&, const Epitome&) = default;
};

// One diagonal Gaussian over descriptor space per mapping, mappings x dims.
struct DescriptorEpitome {
  int mappings = 0;
  int dims = 0;
  std::vector<double> mu;
  std::vector<double> phi;

  DescriptorEpitome() = default;
  DescriptorEpitome(int mappings, int dims);

  std::span<const double> mean_row(int l) const {
    return {mu.data() + static_cast<std::size_t>(l) * dims,
            static_cast<std::size_t>(dims)};
  }
  std::span<const double> variance_row(int l) const {
    return {phi.data() + static_cast<std::size_t>(l) * dims,
            static_cast<std::size_t>(dims)};
  }

  friend bool operator==(const DescriptorEpitome&, const DescriptorEpitome&) = default;
};

// Log of the categorical prior over mappings.
struct MappingPrior {
  std::vector<double> log_pi;

  static MappingPrior uniform(int mappings);
  // Floors each probability at `floor`, renormalizes and takes logs.
  // Returns how many entries were raised to the floor.
  static MappingPrior from_probabilities(std::span<const double> pi,
                                         double floor = kPriorFloor,
                                         std::size_t* floored = nullptr);

  friend bool operator==(const MappingPrior&, const MappingPrior&) = default;
};

// Color epitome and descriptor epitome sharing one mapping space.
struct DualEpitome {
  Epitome yiq;
  DescriptorEpitome dsift;
  MappingPrior prior;
  int patch_size = 0;
  int descriptor_grid = 0;
  double lambda = 0.5;

  int mappings() const { return yiq.mappings(); }

  // Throws InvalidInput when member sizes disagree or values are out of range.
  void validate() const;

  friend bool operator==(const DualEpitome&, const DualEpitome&) = default;
};

}  // namespace epicolor
