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

#include "epicolor/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "epicolor/dsift.hpp"
#include "epicolor/errors.hpp"

namespace epicolor {

double gaussian_log_density(double x, double mu, double phi) {
  const double r = x - mu;
  return -0.5 * std::log(2.0 * std::numbers::pi * phi) - r * r / (2.0 * phi);
}

Epitome::Epitome(int rows, int cols, int channels)
    : rows(rows), cols(cols), channels(channels) {
  if (rows < 1 || cols < 1 || channels < 1) {
    throw InvalidInput("epitome dimensions must be positive");
  }
  const std::size_t n = static_cast<std::size_t>(rows) * cols * channels;
  mu.assign(n, 0.0);
  phi.assign(n, 1.0);
}

DescriptorEpitome::DescriptorEpitome(int mappings, int dims)
    : mappings(mappings), dims(dims) {
  if (mappings < 1 || dims < 1) {
    throw InvalidInput("descriptor epitome dimensions must be positive");
  }
  const std::size_t n = static_cast<std::size_t>(mappings) * dims;
  mu.assign(n, 0.0);
  phi.assign(n, 1.0);
}

MappingPrior MappingPrior::uniform(int mappings) {
  if (mappings < 1) throw InvalidInput("prior needs at least one mapping");
  return {std::vector<double>(mappings, -std::log(static_cast<double>(mappings)))};
}

MappingPrior MappingPrior::from_probabilities(std::span<const double> pi,
                                              double floor,
                                              std::size_t* floored) {
  if (pi.empty()) throw InvalidInput("prior needs at least one mapping");
  std::vector<double> p(pi.begin(), pi.end());
  std::size_t raised = 0;
  double total = 0.0;
  for (double& v : p) {
    if (!(v >= floor)) {
      v = floor;
      ++raised;
    }
    total += v;
  }
  MappingPrior prior;
  prior.log_pi.resize(p.size());
  const double log_total = std::log(total);
  for (std::size_t l = 0; l < p.size(); ++l) {
    prior.log_pi[l] = std::log(p[l]) - log_total;
  }
  if (floored) *floored = raised;
  return prior;
}

void DualEpitome::validate() const {
  const int l = yiq.mappings();
  if (yiq.rows < 1 || yiq.cols < 1 || yiq.channels < 1) {
    throw InvalidInput("epitome dimensions must be positive");
  }
  const std::size_t n = static_cast<std::size_t>(l) * yiq.channels;
  if (yiq.mu.size() != n || yiq.phi.size() != n) {
    throw InvalidInput("epitome mean/variance maps have the wrong size");
  }
  if (dsift.mappings != l || prior.log_pi.size() != static_cast<std::size_t>(l)) {
    throw InvalidInput("epitome members disagree on the number of mappings");
  }
  if (descriptor_grid < 1 || dsift.dims != descriptor_length(descriptor_grid)) {
    throw InvalidInput("descriptor epitome width does not match descriptor grid");
  }
  const std::size_t nd = static_cast<std::size_t>(l) * dsift.dims;
  if (dsift.mu.size() != nd || dsift.phi.size() != nd) {
    throw InvalidInput("descriptor epitome tables have the wrong size");
  }
  if (patch_size < 2 * descriptor_grid) {
    throw InvalidInput("patch size too small for descriptor grid");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw InvalidInput("lambda must lie in [0, 1]");
  }
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!std::all_of(yiq.phi.begin(), yiq.phi.end(), positive) ||
      !std::all_of(dsift.phi.begin(), dsift.phi.end(), positive)) {
    throw InvalidInput("variances must be positive and finite");
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(yiq.mu.begin(), yiq.mu.end(), finite) ||
      !std::all_of(dsift.mu.begin(), dsift.mu.end(), finite) ||
      !std::all_of(prior.log_pi.begin(), prior.log_pi.end(), finite)) {
    throw InvalidInput("model contains non-finite values");
  }
}

}  // namespace epicolor
