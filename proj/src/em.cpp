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

#include "epicolor/em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "epicolor/errors.hpp"
#include "epicolor/likelihood.hpp"
#include "parallel.hpp"

namespace epicolor {

namespace {

// Patches per accumulation chunk, and chunks in flight per merge wave. Both
// are fixed so the summation tree only depends on the number of patches.
constexpr std::size_t kChunkPatches = 8;
constexpr std::size_t kChunksPerWave = 16;

// Sums `fill(begin, end, partial)` over fixed chunks of [0, items); partials
// are added into the total strictly in chunk order.
template <typename Fill>
std::vector<double> ordered_chunk_sum(std::size_t items, std::size_t width,
                                      unsigned threads, Fill&& fill) {
  std::vector<double> total(width, 0.0);
  const std::size_t chunks = (items + kChunkPatches - 1) / kChunkPatches;
  std::vector<std::vector<double>> partials(std::min(kChunksPerWave, chunks));
  for (std::size_t wave = 0; wave < chunks; wave += kChunksPerWave) {
    const std::size_t n = std::min(kChunksPerWave, chunks - wave);
    detail::parallel_for(n, threads, [&](std::size_t s) {
      auto& buf = partials[s];
      buf.assign(width, 0.0);
      const std::size_t c = wave + s;
      fill(c * kChunkPatches, std::min(items, (c + 1) * kChunkPatches), buf);
    });
    for (std::size_t s = 0; s < n; ++s) {
      const auto& buf = partials[s];
      for (std::size_t i = 0; i < width; ++i) total[i] += buf[i];
    }
  }
  return total;
}

// Geometry of an epitome padded by K - 1 rows and columns so that every
// patch placement is a contiguous rectangle.
struct PaddedGeometry {
  int rows;
  int cols;
  int patch_size;
  int padded_rows() const { return rows + patch_size - 1; }
  int padded_cols() const { return cols + patch_size - 1; }
  std::size_t padded_size() const {
    return static_cast<std::size_t>(padded_rows()) * padded_cols();
  }
  std::size_t mappings() const { return static_cast<std::size_t>(rows) * cols; }
};

// Adds padded[i][j] into folded[i mod rows][j mod cols].
void fold_padded(const PaddedGeometry& g, const double* padded, double* folded) {
  std::fill(folded, folded + g.mappings(), 0.0);
  for (int i = 0; i < g.padded_rows(); ++i) {
    for (int j = 0; j < g.padded_cols(); ++j) {
      folded[static_cast<std::size_t>(i % g.rows) * g.cols + j % g.cols] +=
          padded[static_cast<std::size_t>(i) * g.padded_cols() + j];
    }
  }
}

// Scatters q(l) * value(i) for every patch pixel i into the padded map:
// padded[u + dr][v + dc] += q[u][v] * value(dr, dc).
template <typename Value>
void scatter_patch(const PaddedGeometry& g, std::span<const double> q,
                   Value&& value, double* padded) {
  const int pc = g.padded_cols();
  for (int dr = 0; dr < g.patch_size; ++dr) {
    for (int dc = 0; dc < g.patch_size; ++dc) {
      const double z = value(dr, dc);
      for (int u = 0; u < g.rows; ++u) {
        const double* qrow = q.data() + static_cast<std::size_t>(u) * g.cols;
        double* prow = padded + static_cast<std::size_t>(u + dr) * pc + dc;
        for (int v = 0; v < g.cols; ++v) prow[v] += qrow[v] * z;
      }
    }
  }
}

// Lays out `values` (rows x cols x channels) on the padded grid for channel ch.
std::vector<double> pad_channel(const PaddedGeometry& g,
                                const std::vector<double>& values, int channels,
                                int ch) {
  std::vector<double> padded(g.padded_size());
  for (int i = 0; i < g.padded_rows(); ++i) {
    for (int j = 0; j < g.padded_cols(); ++j) {
      padded[static_cast<std::size_t>(i) * g.padded_cols() + j] =
          values[(static_cast<std::size_t>(i % g.rows) * g.cols + j % g.cols) *
                     channels + ch];
    }
  }
  return padded;
}

// Per-patch logsumexp values; fills `posterior` rows when given.
std::vector<double> score_patches(const TrainingSet& set,
                                  const DualEpitome& model,
                                  FeatureChannels features, unsigned threads,
                                  PosteriorTable* posterior) {
  if (set.patches.size() != set.descriptors.size()) {
    throw InvalidInput("training set has mismatched patch/descriptor counts");
  }
  const auto channels = selected_channels(features);
  const bool luminance_only = features == FeatureChannels::kLuminanceAndDescriptor;
  const PatchScorer color(model.yiq, model.patch_size, channels);
  const DescriptorScorer descriptor(model.dsift);
  const int mappings = model.mappings();
  std::vector<double> lse(set.size());
  detail::parallel_for(set.size(), threads, [&](std::size_t k) {
    std::vector<double> ll_color(mappings), ll_desc(mappings), q(mappings);
    if (luminance_only) {
      color.score(set.patches[k].channel(0, ChannelSemantics::kY), ll_color);
    } else {
      color.score(set.patches[k], ll_color);
    }
    descriptor.score(set.descriptors[k].values, ll_desc);
    const auto combined = combined_log_likelihoods(ll_color, ll_desc, model.lambda);
    lse[k] = e_step(combined, model.prior,
                    posterior ? posterior->row(k) : std::span<double>(q));
  });
  return lse;
}

double uniform_noise(std::mt19937_64& gen, double half_width) {
  const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return half_width * (2.0 * u - 1.0);
}

}  // namespace

std::vector<int> selected_channels(FeatureChannels features) {
  if (features == FeatureChannels::kLuminanceAndDescriptor) return {0};
  return {0, 1, 2};
}

void TrainConfig::validate() const {
  if (patch_size < 1) throw InvalidInput("patch size must be >= 1");
  if (!(omega > 0.0 && omega <= 1.0)) throw InvalidInput("omega must lie in (0, 1]");
  if (iterations < 0) throw InvalidInput("iterations must be >= 0");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidInput("lambda must lie in [0, 1]");
  if (descriptor_grid < 1) throw InvalidInput("descriptor grid must be >= 1");
  if (patch_size < 2 * descriptor_grid) {
    throw InvalidInput("patch size " + std::to_string(patch_size) +
                       " is too small for descriptor grid " +
                       std::to_string(descriptor_grid) + " (need >= " +
                       std::to_string(2 * descriptor_grid) + ")");
  }
  if (!(epitome_scale > 0.0 && epitome_scale <= 1.0)) {
    throw InvalidInput("epitome scale must lie in (0, 1]");
  }
  if (!(variance_floor > 0.0) || !(prior_floor > 0.0)) {
    throw InvalidInput("floors must be positive");
  }
  if (!(init_noise >= 0.0)) throw InvalidInput("init noise must be >= 0");
  if (!(convergence_tolerance >= 0.0)) {
    throw InvalidInput("convergence tolerance must be >= 0");
  }
}

TrainingSet make_training_set(const RasterImage& yiq, const PatchGrid& grid,
                              int descriptor_grid, unsigned threads) {
  if (yiq.channels() != 3 || yiq.semantics() != ChannelSemantics::kYIQ) {
    throw InvalidInput("training set needs a YIQ image");
  }
  TrainingSet set;
  set.patches.resize(grid.count());
  detail::parallel_for(grid.count(), threads, [&](std::size_t k) {
    set.patches[k] = extract_patch(yiq, grid.anchors[k], grid.patch_size);
  });
  set.descriptors = descriptor_image(yiq.channel(0, ChannelSemantics::kY), grid,
                                     descriptor_grid, threads);
  return set;
}

double log_sum_exp(std::span<const double> v) {
  if (v.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double e_step(std::span<const double> combined_ll, const MappingPrior& prior,
              std::span<double> q) {
  const std::size_t n = combined_ll.size();
  if (prior.log_pi.size() != n || q.size() != n) {
    throw InvalidInput("e_step: length mismatch between likelihoods and prior");
  }
  double m = -std::numeric_limits<double>::infinity();
  bool valid = true;
  for (std::size_t l = 0; l < n; ++l) {
    q[l] = prior.log_pi[l] + combined_ll[l];
    valid = valid && !std::isnan(q[l]);
    m = std::max(m, q[l]);
  }
  if (!valid || !std::isfinite(m)) {
    throw InvalidInput("e_step: scores must be finite");
  }
  double s = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    q[l] = std::exp(q[l] - m);
    s += q[l];
  }
  const double inv = 1.0 / s;
  for (double& v : q) v *= inv;
  return m + std::log(s);
}

std::vector<double> e_step(std::span<const double> combined_ll,
                           const MappingPrior& prior) {
  std::vector<double> q(combined_ll.size());
  e_step(combined_ll, prior, q);
  return q;
}

EStepResult e_step_all(const TrainingSet& set, const DualEpitome& model,
                       FeatureChannels features, unsigned threads) {
  EStepResult result;
  result.posterior = PosteriorTable(set.size(), model.mappings());
  const auto lse = score_patches(set, model, features, threads, &result.posterior);
  for (double v : lse) result.objective += v;
  return result;
}

double total_log_likelihood(const TrainingSet& set, const DualEpitome& model,
                            unsigned threads) {
  const auto lse = score_patches(set, model, FeatureChannels::kYiqAndDescriptor,
                                 threads, nullptr);
  double total = 0.0;
  for (double v : lse) total += v;
  return total;
}

MStepResult m_step(const TrainingSet& set, const PosteriorTable& posterior,
                   const DualEpitome& previous, const MStepOptions& options) {
  previous.validate();
  const std::size_t patches = set.size();
  const int mappings = previous.mappings();
  if (patches == 0) throw InvalidInput("m_step needs at least one patch");
  if (posterior.patches() != patches || posterior.mappings() != mappings ||
      set.descriptors.size() != patches) {
    throw InvalidInput("m_step: posterior table does not match training set");
  }
  const Epitome& epi = previous.yiq;
  const int channels = epi.channels;
  const int dims = previous.dsift.dims;
  const PaddedGeometry g{epi.rows, epi.cols, previous.patch_size};
  for (const auto& p : set.patches) {
    if (p.width() != g.patch_size || p.height() != g.patch_size ||
        p.channels() != channels) {
      throw InvalidInput("m_step: patch shape does not match the model");
    }
  }
  for (const auto& d : set.descriptors) {
    if (d.values.size() != static_cast<std::size_t>(dims)) {
      throw InvalidInput("m_step: descriptor length does not match the model");
    }
  }

  const std::size_t L = g.mappings();
  const std::size_t P = g.padded_size();
  const std::size_t D = static_cast<std::size_t>(dims);

  // Pass 1: responsibility mass, color numerators, descriptor numerators.
  // Layout: [qsum L][color C x P][descriptor L x D]
  const std::size_t color_off = L;
  const std::size_t desc_off = color_off + channels * P;
  const auto first = ordered_chunk_sum(
      patches, desc_off + L * D, options.threads,
      [&](std::size_t begin, std::size_t end, std::vector<double>& acc) {
        for (std::size_t k = begin; k < end; ++k) {
          const auto q = posterior.row(k);
          const auto& patch = set.patches[k];
          const auto& d = set.descriptors[k].values;
          for (std::size_t l = 0; l < L; ++l) acc[l] += q[l];
          for (int ch = 0; ch < channels; ++ch) {
            scatter_patch(g, q,
                          [&](int dr, int dc) { return patch.at(dr, dc, ch); },
                          acc.data() + color_off + ch * P);
          }
          for (std::size_t l = 0; l < L; ++l) {
            const double w = q[l];
            if (w == 0.0) continue;
            double* row = acc.data() + desc_off + l * D;
            for (std::size_t j = 0; j < D; ++j) row[j] += w * d[j];
          }
        }
      });

  const double* qsum = first.data();
  // Weight of epitome coordinate j: sum over mappings covering j of qsum.
  std::vector<double> weight(L, 0.0);
  for (int er = 0; er < g.rows; ++er) {
    for (int ec = 0; ec < g.cols; ++ec) {
      double s = 0.0;
      for (int dr = 0; dr < g.patch_size; ++dr) {
        const int u = ((er - dr) % g.rows + g.rows) % g.rows;
        for (int dc = 0; dc < g.patch_size; ++dc) {
          const int v = ((ec - dc) % g.cols + g.cols) % g.cols;
          s += qsum[static_cast<std::size_t>(u) * g.cols + v];
        }
      }
      weight[static_cast<std::size_t>(er) * g.cols + ec] = s;
    }
  }

  MStepResult result{previous, {}};
  DualEpitome& next = result.model;
  std::vector<double> folded(L);
  for (int ch = 0; ch < channels; ++ch) {
    fold_padded(g, first.data() + color_off + ch * P, folded.data());
    for (std::size_t j = 0; j < L; ++j) {
      if (weight[j] > 0.0) next.yiq.mu[j * channels + ch] = folded[j] / weight[j];
    }
  }
  for (std::size_t l = 0; l < L; ++l) {
    if (!(qsum[l] > 0.0)) continue;
    const double* row = first.data() + desc_off + l * D;
    for (std::size_t j = 0; j < D; ++j) next.dsift.mu[l * D + j] = row[j] / qsum[l];
  }

  // Pass 2: squared deviations from the new means.
  std::vector<std::vector<double>> padded_mu;
  for (int ch = 0; ch < channels; ++ch) {
    padded_mu.push_back(pad_channel(g, next.yiq.mu, channels, ch));
  }
  const double sign = options.inject_variance_sign_fault ? -1.0 : 1.0;
  const std::size_t desc_off2 = channels * P;
  const auto second = ordered_chunk_sum(
      patches, desc_off2 + L * D, options.threads,
      [&](std::size_t begin, std::size_t end, std::vector<double>& acc) {
        const int pc = g.padded_cols();
        for (std::size_t k = begin; k < end; ++k) {
          const auto q = posterior.row(k);
          const auto& patch = set.patches[k];
          const auto& d = set.descriptors[k].values;
          for (int ch = 0; ch < channels; ++ch) {
            const double* mu = padded_mu[ch].data();
            double* out = acc.data() + ch * P;
            for (int dr = 0; dr < g.patch_size; ++dr) {
              for (int dc = 0; dc < g.patch_size; ++dc) {
                const double z = patch.at(dr, dc, ch);
                for (int u = 0; u < g.rows; ++u) {
                  const std::size_t off = static_cast<std::size_t>(u + dr) * pc + dc;
                  const double* qrow = q.data() + static_cast<std::size_t>(u) * g.cols;
                  const double* mrow = mu + off;
                  double* orow = out + off;
                  for (int v = 0; v < g.cols; ++v) {
                    const double r = z - sign * mrow[v];
                    orow[v] += qrow[v] * r * r;
                  }
                }
              }
            }
          }
          for (std::size_t l = 0; l < L; ++l) {
            const double w = q[l];
            if (w == 0.0) continue;
            const double* mu = next.dsift.mu.data() + l * D;
            double* row = acc.data() + desc_off2 + l * D;
            for (std::size_t j = 0; j < D; ++j) {
              const double r = d[j] - mu[j];
              row[j] += w * r * r;
            }
          }
        }
      });

  FloorActivity& floors = result.floors;
  for (int ch = 0; ch < channels; ++ch) {
    fold_padded(g, second.data() + ch * P, folded.data());
    for (std::size_t j = 0; j < L; ++j) {
      if (!(weight[j] > 0.0)) continue;
      double v = folded[j] / weight[j];
      if (!(v >= options.variance_floor)) {
        v = options.variance_floor;
        ++floors.color_variances;
      }
      next.yiq.phi[j * channels + ch] = v;
    }
  }
  for (std::size_t l = 0; l < L; ++l) {
    if (!(qsum[l] > 0.0)) continue;
    const double* row = second.data() + desc_off2 + l * D;
    for (std::size_t j = 0; j < D; ++j) {
      double v = row[j] / qsum[l];
      if (!(v >= options.variance_floor)) {
        v = options.variance_floor;
        ++floors.descriptor_variances;
      }
      next.dsift.phi[l * D + j] = v;
    }
  }

  std::vector<double> pi(L);
  for (std::size_t l = 0; l < L; ++l) pi[l] = qsum[l] / static_cast<double>(patches);
  next.prior = MappingPrior::from_probabilities(pi, options.prior_floor,
                                                &floors.prior_entries);
  return result;
}

DualEpitome init_epitome(const RasterImage& ref_yiq,
                         std::span<const PatchDescriptor> descriptors,
                         const TrainConfig& config) {
  config.validate();
  if (ref_yiq.channels() != 3 || ref_yiq.semantics() != ChannelSemantics::kYIQ) {
    throw InvalidInput("init_epitome needs a YIQ reference image");
  }
  const int rows = static_cast<int>(std::lround(config.epitome_scale * ref_yiq.height()));
  const int cols = static_cast<int>(std::lround(config.epitome_scale * ref_yiq.width()));
  if (rows < config.patch_size || cols < config.patch_size) {
    throw InvalidInput("epitome of " + std::to_string(rows) + "x" +
                       std::to_string(cols) + " is smaller than patch size " +
                       std::to_string(config.patch_size));
  }
  const int dims = descriptor_length(config.descriptor_grid);
  for (const auto& d : descriptors) {
    if (d.values.size() != static_cast<std::size_t>(dims)) {
      throw InvalidInput("descriptor length does not match descriptor grid");
    }
  }

  DualEpitome model;
  model.yiq = Epitome(rows, cols, 3);
  model.dsift = DescriptorEpitome(rows * cols, dims);
  model.prior = MappingPrior::uniform(rows * cols);
  model.patch_size = config.patch_size;
  model.descriptor_grid = config.descriptor_grid;
  model.lambda = config.lambda;

  const auto px = ref_yiq.data();
  const std::size_t pixels = px.size() / 3;
  double mean[3] = {0, 0, 0};
  double var[3] = {0, 0, 0};
  for (std::size_t p = 0; p < pixels; ++p)
    for (int ch = 0; ch < 3; ++ch) mean[ch] += px[3 * p + ch];
  for (double& m : mean) m /= static_cast<double>(pixels);
  for (std::size_t p = 0; p < pixels; ++p) {
    for (int ch = 0; ch < 3; ++ch) {
      const double r = px[3 * p + ch] - mean[ch];
      var[ch] += r * r;
    }
  }
  for (double& v : var) {
    v = std::max(v / static_cast<double>(pixels), config.variance_floor);
  }

  std::vector<double> dmean(dims, 0.0), dvar(dims, 0.0);
  if (!descriptors.empty()) {
    for (const auto& d : descriptors)
      for (int j = 0; j < dims; ++j) dmean[j] += d.values[j];
    for (double& m : dmean) m /= static_cast<double>(descriptors.size());
    for (const auto& d : descriptors) {
      for (int j = 0; j < dims; ++j) {
        const double r = d.values[j] - dmean[j];
        dvar[j] += r * r;
      }
    }
    for (double& v : dvar) v /= static_cast<double>(descriptors.size());
  }
  for (double& v : dvar) v = std::max(v, config.variance_floor);

  std::mt19937_64 gen(config.seed);
  for (std::size_t i = 0; i < model.yiq.mu.size(); ++i) {
    model.yiq.mu[i] = mean[i % 3] + uniform_noise(gen, config.init_noise);
    model.yiq.phi[i] = var[i % 3];
  }
  for (std::size_t i = 0; i < model.dsift.mu.size(); ++i) {
    model.dsift.mu[i] = dmean[i % dims] + uniform_noise(gen, config.init_noise);
    model.dsift.phi[i] = dvar[i % dims];
  }
  return model;
}

TrainResult train(const RasterImage& ref_rgb, const TrainConfig& config,
                  const IterationCallback& on_iteration) {
  config.validate();
  if (ref_rgb.channels() != 3 || ref_rgb.semantics() != ChannelSemantics::kRGB) {
    throw InvalidInput("training needs a 3-channel RGB reference image");
  }
  const RasterImage yiq = rgb_to_yiq(ref_rgb);
  const PatchGrid grid =
      sample_grid(yiq.width(), yiq.height(), config.patch_size, config.omega);
  const TrainingSet set =
      make_training_set(yiq, grid, config.descriptor_grid, config.threads);

  TrainResult result;
  result.model = init_epitome(yiq, set.descriptors, config);
  if (config.iterations == 0) {
    result.initial_objective = std::numeric_limits<double>::quiet_NaN();
    return result;
  }

  MStepOptions options;
  options.variance_floor = config.variance_floor;
  options.prior_floor = config.prior_floor;
  options.threads = config.threads;

  EStepResult estep = e_step_all(set, result.model, config.features, config.threads);
  result.initial_objective = estep.objective;
  double previous = estep.objective;
  for (int it = 1; it <= config.iterations; ++it) {
    MStepResult mstep = m_step(set, estep.posterior, result.model, options);
    result.model = std::move(mstep.model);
    estep = e_step_all(set, result.model, config.features, config.threads);
    IterationRecord record{it, estep.objective, mstep.floors};
    result.history.push_back(record);
    if (on_iteration) on_iteration(record);
    if (std::abs(estep.objective - previous) <
        config.convergence_tolerance * std::abs(previous)) {
      result.converged = true;
      break;
    }
    previous = estep.objective;
  }
  return result;
}

}  // namespace epicolor
