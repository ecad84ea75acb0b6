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
#include "epicolor/model.hpp"

namespace epicolor {

// Patch log-likelihood under every mapping of the epitome.
//
// Patch channel i is scored against epitome channel channels[i], so a
// one-channel luminance patch with channels = {0} gives the Y-only score used
// at inference time. Entry l is the sum of gaussian_log_density over all
// patch pixels and selected channels with epitome coordinates taken from
// mapping_coords(l, ...).

// Reference implementation: literal triple loop over mappings, pixels and
// channels. Slow, but it is the definition the fast path is tested against.
std::vector<double> patch_log_likelihoods_naive(const RasterImage& patch,
                                                const Epitome& epitome,
                                                std::span<const int> channels);

// Accelerated scorer for a fixed epitome and patch size.
//
// Expanding the Gaussian exponent splits entry l into
//   -1/2 * sum_window(log(2 pi phi) + mu^2 / phi)
//   + sum_i z_i * (mu / phi)[T_l(i)] - 1/2 * sum_i z_i^2 * (1 / phi)[T_l(i)].
// The first term does not depend on the patch and is precomputed as a cyclic
// box sum; the other two are cyclic cross-correlations of the patch with
// precomputed maps, evaluated over a wrap-padded copy so that the inner loop
// runs over contiguous memory.
class PatchScorer {
 public:
  PatchScorer(const Epitome& epitome, int patch_size, std::vector<int> channels);

  int mappings() const { return rows_ * cols_; }
  const std::vector<int>& channels() const { return channels_; }

  // Overwrites `out` (length L) with the per-mapping log-likelihoods.
  void score(const RasterImage& patch, std::span<double> out) const;
  std::vector<double> score(const RasterImage& patch) const;

 private:
  int rows_;
  int cols_;
  int patch_size_;
  int padded_cols_;
  std::vector<int> channels_;
  // Per selected channel: padded mu/phi and 1/phi maps, (rows+K-1) x (cols+K-1).
  std::vector<std::vector<double>> mean_over_var_;
  std::vector<std::vector<double>> inv_var_;
  // Patch-independent part summed over channels, length L.
  std::vector<double> constant_;
};

// All epitome channels, accelerated path. patch.channels() must equal
// epitome.channels.
std::vector<double> patch_log_likelihoods(const RasterImage& patch,
                                          const Epitome& epitome);

std::vector<double> descriptor_log_likelihoods(const PatchDescriptor& d,
                                               const DescriptorEpitome& de);

// Caches per-row normalizers and inverse variances of a descriptor epitome.
class DescriptorScorer {
 public:
  explicit DescriptorScorer(const DescriptorEpitome& de);
  void score(std::span<const double> descriptor, std::span<double> out) const;

 private:
  int mappings_;
  int dims_;
  std::vector<double> mean_;
  std::vector<double> inv_var_;
  std::vector<double> constant_;
};

// lambda * ll_yiq + (1 - lambda) * ll_dsift, elementwise.
std::vector<double> combined_log_likelihoods(std::span<const double> ll_yiq,
                                             std::span<const double> ll_dsift,
                                             double lambda);

}  // namespace epicolor
