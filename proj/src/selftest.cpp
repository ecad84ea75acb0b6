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

#include "epicolor/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "epicolor/em.hpp"
#include "epicolor/likelihood.hpp"

namespace epicolor {

namespace {

struct Instance {
  TrainingSet set;
  DualEpitome model;
  PosteriorTable posterior;
};

double uniform(std::mt19937_64& gen, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(gen);
}

Instance random_instance(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> pick_k(2, 3);
  const int k = pick_k(gen);
  const int height = std::uniform_int_distribution<int>(k, 8)(gen);
  const int width = std::uniform_int_distribution<int>(k, 8)(gen);
  const int rows = std::uniform_int_distribution<int>(1, 4)(gen);
  const int cols = std::uniform_int_distribution<int>(1, 4)(gen);

  RasterImage yiq(width, height, 3, ChannelSemantics::kYIQ);
  for (double& v : yiq.data()) v = uniform(gen, -0.5, 1.0);
  const PatchGrid grid = sample_grid(width, height, k, uniform(gen, 0.3, 1.0));

  Instance inst;
  inst.set = make_training_set(yiq, grid, 1);
  inst.model.yiq = Epitome(rows, cols, 3);
  for (double& v : inst.model.yiq.mu) v = uniform(gen, -0.5, 1.0);
  for (double& v : inst.model.yiq.phi) v = uniform(gen, 0.01, 1.0);
  const int mappings = rows * cols;
  inst.model.dsift = DescriptorEpitome(mappings, descriptor_length(1));
  for (double& v : inst.model.dsift.mu) v = uniform(gen, 0.0, 1.0);
  for (double& v : inst.model.dsift.phi) v = uniform(gen, 0.01, 1.0);
  inst.model.prior = MappingPrior::uniform(mappings);
  inst.model.patch_size = k;
  inst.model.descriptor_grid = 1;
  inst.model.lambda = uniform(gen, 0.0, 1.0);

  inst.posterior = PosteriorTable(inst.set.size(), mappings);
  for (std::size_t p = 0; p < inst.set.size(); ++p) {
    auto row = inst.posterior.row(p);
    double total = 0.0;
    for (double& v : row) {
      v = uniform(gen, 0.0, 1.0) < 0.2 ? 0.0 : uniform(gen, 0.0, 1.0);
      total += v;
    }
    if (total == 0.0) {
      row[0] = 1.0;
      total = 1.0;
    }
    for (double& v : row) v /= total;
  }
  return inst;
}

// Explicit summation over (patch, pixel, mapping) triples.
DualEpitome brute_force_m_step(const Instance& inst) {
  const DualEpitome& prev = inst.model;
  const Epitome& e = prev.yiq;
  const int k = prev.patch_size;
  const int L = e.mappings();
  const int dims = prev.dsift.dims;
  const std::size_t Q = inst.set.size();

  std::vector<double> den(L, 0.0), num(static_cast<std::size_t>(L) * 3, 0.0);
  for (std::size_t p = 0; p < Q; ++p)
    for (int l = 0; l < L; ++l)
      for (int dr = 0; dr < k; ++dr)
        for (int dc = 0; dc < k; ++dc) {
          const auto c = mapping_coords(l, dr, dc, e.rows, e.cols);
          const int j = c.row * e.cols + c.col;
          const double w = inst.posterior.row(p)[l];
          den[j] += w;
          for (int ch = 0; ch < 3; ++ch) num[j * 3 + ch] += w * inst.set.patches[p].at(dr, dc, ch);
        }
  DualEpitome out = prev;
  for (int j = 0; j < L; ++j)
    if (den[j] > 0)
      for (int ch = 0; ch < 3; ++ch) out.yiq.mu[j * 3 + ch] = num[j * 3 + ch] / den[j];

  std::vector<double> sq(static_cast<std::size_t>(L) * 3, 0.0);
  for (std::size_t p = 0; p < Q; ++p)
    for (int l = 0; l < L; ++l)
      for (int dr = 0; dr < k; ++dr)
        for (int dc = 0; dc < k; ++dc) {
          const auto c = mapping_coords(l, dr, dc, e.rows, e.cols);
          const int j = c.row * e.cols + c.col;
          const double w = inst.posterior.row(p)[l];
          for (int ch = 0; ch < 3; ++ch) {
            const double r = inst.set.patches[p].at(dr, dc, ch) - out.yiq.mu[j * 3 + ch];
            sq[j * 3 + ch] += w * r * r;
          }
        }
  for (int j = 0; j < L; ++j)
    if (den[j] > 0)
      for (int ch = 0; ch < 3; ++ch)
        out.yiq.phi[j * 3 + ch] = std::max(sq[j * 3 + ch] / den[j], kVarianceFloor);

  std::vector<double> pi(L, 0.0);
  for (int l = 0; l < L; ++l) {
    double w = 0.0;
    std::vector<double> m(dims, 0.0), v(dims, 0.0);
    for (std::size_t p = 0; p < Q; ++p) {
      const double q = inst.posterior.row(p)[l];
      w += q;
      for (int d = 0; d < dims; ++d) m[d] += q * inst.set.descriptors[p].values[d];
    }
    pi[l] = w / static_cast<double>(Q);
    if (!(w > 0)) continue;
    for (int d = 0; d < dims; ++d) m[d] /= w;
    for (std::size_t p = 0; p < Q; ++p) {
      const double q = inst.posterior.row(p)[l];
      for (int d = 0; d < dims; ++d) {
        const double r = inst.set.descriptors[p].values[d] - m[d];
        v[d] += q * r * r;
      }
    }
    for (int d = 0; d < dims; ++d) {
      out.dsift.mu[static_cast<std::size_t>(l) * dims + d] = m[d];
      out.dsift.phi[static_cast<std::size_t>(l) * dims + d] = std::max(v[d] / w, kVarianceFloor);
    }
  }
  double total = 0.0;
  for (double& p : pi) total += (p = std::max(p, kPriorFloor));
  for (int l = 0; l < L; ++l) out.prior.log_pi[l] = std::log(pi[l] / total);
  return out;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

PropertyResult check_posterior_normalization(std::mt19937_64& gen, int instances) {
  PropertyResult r{"posterior_normalization", true, ""};
  double worst = 0.0;
  for (int t = 0; t < instances * 10; ++t) {
    const int L = std::uniform_int_distribution<int>(1, 64)(gen);
    std::vector<double> ll(L), pi(L);
    for (double& v : ll) v = uniform(gen, -500.0, 50.0);
    for (double& v : pi) v = uniform(gen, 0.0, 1.0);
    const auto prior = MappingPrior::from_probabilities(pi);
    const auto q = e_step(ll, prior);
    double sum = 0.0;
    for (double v : q) {
      if (!(v >= 0.0)) r.passed = false;
      sum += v;
    }
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  if (worst > 1e-9) r.passed = false;
  std::ostringstream os;
  os << "max |row sum - 1| = " << worst;
  r.detail = os.str();
  return r;
}

PropertyResult check_fast_path(std::mt19937_64& gen, int instances) {
  PropertyResult r{"fast_path_equivalence", true, ""};
  double worst = 0.0;
  for (int t = 0; t < instances; ++t) {
    const Instance inst = random_instance(gen);
    const std::vector<int> all = {0, 1, 2};
    const PatchScorer scorer(inst.model.yiq, inst.model.patch_size, all);
    for (const auto& patch : inst.set.patches) {
      const auto naive = patch_log_likelihoods_naive(patch, inst.model.yiq, all);
      const auto fast = scorer.score(patch);
      for (std::size_t l = 0; l < naive.size(); ++l) {
        const double rel = std::abs(fast[l] - naive[l]) / std::max(std::abs(naive[l]), 1e-300);
        worst = std::max(worst, rel);
      }
    }
  }
  if (worst > 1e-8) r.passed = false;
  std::ostringstream os;
  os << "max relative difference = " << worst;
  r.detail = os.str();
  return r;
}

PropertyResult check_m_step(std::mt19937_64& gen, int instances, bool fault) {
  PropertyResult r{"m_step_oracle", true, ""};
  double worst = 0.0;
  for (int t = 0; t < instances; ++t) {
    const Instance inst = random_instance(gen);
    MStepOptions options;
    options.inject_variance_sign_fault = fault;
    const DualEpitome got = m_step(inst.set, inst.posterior, inst.model, options).model;
    const DualEpitome want = brute_force_m_step(inst);
    worst = std::max({worst, max_abs_diff(got.yiq.mu, want.yiq.mu),
                      max_abs_diff(got.yiq.phi, want.yiq.phi),
                      max_abs_diff(got.dsift.mu, want.dsift.mu),
                      max_abs_diff(got.dsift.phi, want.dsift.phi),
                      max_abs_diff(got.prior.log_pi, want.prior.log_pi)});
  }
  if (!(worst <= 1e-10)) r.passed = false;
  std::ostringstream os;
  os << "max absolute difference = " << worst;
  r.detail = os.str();
  return r;
}

}  // namespace

std::vector<PropertyResult> run_selftest(const SelfTestOptions& options) {
  std::mt19937_64 gen(options.seed);
  std::vector<PropertyResult> results;
  results.push_back(check_posterior_normalization(gen, options.instances));
  results.push_back(check_fast_path(gen, options.instances));
  results.push_back(check_m_step(gen, options.instances, options.inject_variance_sign_fault));
  return results;
}

}  // namespace epicolor
