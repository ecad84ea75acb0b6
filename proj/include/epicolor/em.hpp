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

// Expectation-maximization for the dual (color + descriptor) epitome.
//
// Every patch k is explained by one hidden mapping T_k in [0, L). The
// complete-data score of mapping l is
//   log pi_l + lambda * log p(color patch | l) + (1 - lambda) * log p(desc | l)
// and the objective is sum_k logsumexp_l of that score. The E-step turns the
// scores into responsibilities q_k(l); the M-step re-estimates the epitome
// means/variances, the descriptor table and the prior from those
// responsibilities in closed form.
//
// Accumulations over patches are split into fixed chunks of patches whose
// partial sums are merged in chunk order, so results do not depend on the
// number of worker threads.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "epicolor/dsift.hpp"
#include "epicolor/image.hpp"
#include "epicolor/model.hpp"
#include "epicolor/patches.hpp"

namespace epicolor {

// Which color channels take part in the likelihood.
enum class FeatureChannels {
  kYiqAndDescriptor,        // training: all three YIQ channels
  kLuminanceAndDescriptor,  // inference: Y only
};

std::vector<int> selected_channels(FeatureChannels features);

struct TrainConfig {
  int patch_size = 12;
  double omega = 0.5;
  int iterations = 20;
  double lambda = 0.5;
  int descriptor_grid = 3;
  double epitome_scale = 0.5;
  double variance_floor = kVarianceFloor;
  double prior_floor = kPriorFloor;
  double convergence_tolerance = 1e-6;
  // Half-width of the uniform noise added to the initial means.
  double init_noise = 0.05;
  std::uint64_t seed = 0;
  FeatureChannels features = FeatureChannels::kYiqAndDescriptor;
  // 0 = all hardware threads. Results are identical for every value.
  unsigned threads = 0;

  void validate() const;
};

// Posterior responsibilities, one row of L entries per patch.
class PosteriorTable {
 public:
  PosteriorTable() = default;
  PosteriorTable(std::size_t patches, int mappings)
      : patches_(patches), mappings_(mappings),
        q_(patches * static_cast<std::size_t>(mappings), 0.0) {}

  std::size_t patches() const { return patches_; }
  int mappings() const { return mappings_; }
  std::span<double> row(std::size_t k) {
    return {q_.data() + k * mappings_, static_cast<std::size_t>(mappings_)};
  }
  std::span<const double> row(std::size_t k) const {
    return {q_.data() + k * mappings_, static_cast<std::size_t>(mappings_)};
  }

 private:
  std::size_t patches_ = 0;
  int mappings_ = 0;
  std::vector<double> q_;
};

// Patches of the reference (YIQ, K x K) with their descriptors.
struct TrainingSet {
  std::vector<RasterImage> patches;
  std::vector<PatchDescriptor> descriptors;

  std::size_t size() const { return patches.size(); }
};

TrainingSet make_training_set(const RasterImage& yiq, const PatchGrid& grid,
                              int descriptor_grid, unsigned threads = 1);

double log_sum_exp(std::span<const double> v);

// q_l = softmax_l(log_pi[l] + combined_ll[l]) written into `q`; returns the
// log normalizer logsumexp_l(log_pi[l] + combined_ll[l]).
double e_step(std::span<const double> combined_ll, const MappingPrior& prior,
              std::span<double> q);
std::vector<double> e_step(std::span<const double> combined_ll,
                           const MappingPrior& prior);

struct EStepResult {
  PosteriorTable posterior;
  double objective = 0.0;
};

EStepResult e_step_all(const TrainingSet& set, const DualEpitome& model,
                       FeatureChannels features, unsigned threads = 1);

// sum_k logsumexp_l(log_pi[l] + combined_ll_k[l]) with all color channels.
double total_log_likelihood(const TrainingSet& set, const DualEpitome& model,
                            unsigned threads = 1);

struct FloorActivity {
  std::size_t color_variances = 0;
  std::size_t descriptor_variances = 0;
  std::size_t prior_entries = 0;

  bool any() const {
    return color_variances + descriptor_variances + prior_entries > 0;
  }
};

struct MStepOptions {
  double variance_floor = kVarianceFloor;
  double prior_floor = kPriorFloor;
  unsigned threads = 1;
  // Negative control for the self-test: uses (z + mu)^2 in the variance
  // update. Never set outside of tests.
  bool inject_variance_sign_fault = false;
};

struct MStepResult {
  DualEpitome model;
  FloorActivity floors;
};

// Closed-form re-estimation. Epitome coordinates (and descriptor rows) that
// received zero total responsibility keep their previous parameters.
MStepResult m_step(const TrainingSet& set, const PosteriorTable& posterior,
                   const DualEpitome& previous, const MStepOptions& options = {});

// Epitome of round(scale * height) x round(scale * width) locations. Means
// start at the global channel mean plus seeded uniform noise, variances at
// the global variance (floored), prior uniform.
DualEpitome init_epitome(const RasterImage& ref_yiq,
                         std::span<const PatchDescriptor> descriptors,
                         const TrainConfig& config);

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;
  FloorActivity floors;
};

struct TrainResult {
  DualEpitome model;
  // Objective of the initial model; NaN when no iteration ran.
  double initial_objective = 0.0;
  // Objective after each iteration's M-step.
  std::vector<IterationRecord> history;
  bool converged = false;
};

using IterationCallback = std::function<void(const IterationRecord&)>;

TrainResult train(const RasterImage& ref_rgb, const TrainConfig& config,
                  const IterationCallback& on_iteration = {});

}  // namespace epicolor
