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

#include "epicolor/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "epicolor/errors.hpp"

namespace epicolor {

namespace {

void check_channels(const RasterImage& patch, const Epitome& epitome,
                    std::span<const int> channels) {
  if (patch.width() != patch.height()) {
    throw InvalidInput("patches must be square");
  }
  if (static_cast<std::size_t>(patch.channels()) != channels.size()) {
    throw InvalidInput("patch has " + std::to_string(patch.channels()) +
                       " channels but " + std::to_string(channels.size()) +
                       " epitome channels were selected");
  }
  for (int ch : channels) {
    if (ch < 0 || ch >= epitome.channels) {
      throw InvalidInput("epitome channel index out of range");
    }
  }
}

}  // namespace

std::vector<double> patch_log_likelihoods_naive(const RasterImage& patch,
                                                const Epitome& epitome,
                                                std::span<const int> channels) {
  check_channels(patch, epitome, channels);
  const int k = patch.width();
  std::vector<double> out(epitome.mappings(), 0.0);
  for (int l = 0; l < epitome.mappings(); ++l) {
    double sum = 0.0;
    for (int dr = 0; dr < k; ++dr) {
      for (int dc = 0; dc < k; ++dc) {
        const auto [er, ec] = mapping_coords(l, dr, dc, epitome.rows, epitome.cols);
        for (std::size_t i = 0; i < channels.size(); ++i) {
          sum += gaussian_log_density(patch.at(dr, dc, static_cast<int>(i)),
                                      epitome.mean(er, ec, channels[i]),
                                      epitome.variance(er, ec, channels[i]));
        }
      }
    }
    out[l] = sum;
  }
  return out;
}

PatchScorer::PatchScorer(const Epitome& epitome, int patch_size,
                         std::vector<int> channels)
    : rows_(epitome.rows),
      cols_(epitome.cols),
      patch_size_(patch_size),
      padded_cols_(epitome.cols + patch_size - 1),
      channels_(std::move(channels)) {
  if (patch_size < 1) throw InvalidInput("patch size must be >= 1");
  for (int ch : channels_) {
    if (ch < 0 || ch >= epitome.channels) {
      throw InvalidInput("epitome channel index out of range");
    }
  }
  const int padded_rows = rows_ + patch_size - 1;
  const std::size_t padded = static_cast<std::size_t>(padded_rows) * padded_cols_;
  constant_.assign(mappings(), 0.0);
  std::vector<double> per_pixel(static_cast<std::size_t>(rows_) * cols_);
  std::vector<double> row_sums(static_cast<std::size_t>(rows_) * cols_);

  for (int ch : channels_) {
    std::vector<double> b(padded), c(padded);
    for (int i = 0; i < padded_rows; ++i) {
      for (int j = 0; j < padded_cols_; ++j) {
        const int er = i % rows_;
        const int ec = j % cols_;
        const double inv = 1.0 / epitome.variance(er, ec, ch);
        b[static_cast<std::size_t>(i) * padded_cols_ + j] = epitome.mean(er, ec, ch) * inv;
        c[static_cast<std::size_t>(i) * padded_cols_ + j] = inv;
      }
    }
    mean_over_var_.push_back(std::move(b));
    inv_var_.push_back(std::move(c));

    for (int er = 0; er < rows_; ++er) {
      for (int ec = 0; ec < cols_; ++ec) {
        const double m = epitome.mean(er, ec, ch);
        const double v = epitome.variance(er, ec, ch);
        per_pixel[static_cast<std::size_t>(er) * cols_ + ec] =
            std::log(2.0 * std::numbers::pi * v) + m * m / v;
      }
    }
    // Separable cyclic K x K box sum: along columns, then along rows.
    for (int er = 0; er < rows_; ++er) {
      for (int ec = 0; ec < cols_; ++ec) {
        double s = 0.0;
        for (int dc = 0; dc < patch_size; ++dc) {
          s += per_pixel[static_cast<std::size_t>(er) * cols_ + (ec + dc) % cols_];
        }
        row_sums[static_cast<std::size_t>(er) * cols_ + ec] = s;
      }
    }
    for (int er = 0; er < rows_; ++er) {
      for (int ec = 0; ec < cols_; ++ec) {
        double s = 0.0;
        for (int dr = 0; dr < patch_size; ++dr) {
          s += row_sums[static_cast<std::size_t>((er + dr) % rows_) * cols_ + ec];
        }
        constant_[static_cast<std::size_t>(er) * cols_ + ec] -= 0.5 * s;
      }
    }
  }
}

void PatchScorer::score(const RasterImage& patch, std::span<double> out) const {
  if (patch.width() != patch_size_ || patch.height() != patch_size_) {
    throw InvalidInput("patch size does not match scorer");
  }
  if (static_cast<std::size_t>(patch.channels()) != channels_.size()) {
    throw InvalidInput("patch channel count does not match scorer");
  }
  if (out.size() != static_cast<std::size_t>(mappings())) {
    throw InvalidInput("score buffer has the wrong length");
  }
  std::copy(constant_.begin(), constant_.end(), out.begin());
  double* dst = out.data();
  for (std::size_t i = 0; i < channels_.size(); ++i) {
    const double* b = mean_over_var_[i].data();
    const double* c = inv_var_[i].data();
    for (int dr = 0; dr < patch_size_; ++dr) {
      for (int dc = 0; dc < patch_size_; ++dc) {
        const double z = patch.at(dr, dc, static_cast<int>(i));
        const double half_z2 = -0.5 * z * z;
        for (int u = 0; u < rows_; ++u) {
          const std::size_t off =
              static_cast<std::size_t>(u + dr) * padded_cols_ + dc;
          const double* brow = b + off;
          const double* crow = c + off;
          double* orow = dst + static_cast<std::size_t>(u) * cols_;
          for (int v = 0; v < cols_; ++v) {
            orow[v] += z * brow[v] + half_z2 * crow[v];
          }
        }
      }
    }
  }
}

std::vector<double> PatchScorer::score(const RasterImage& patch) const {
  std::vector<double> out(mappings());
  score(patch, out);
  return out;
}

std::vector<double> patch_log_likelihoods(const RasterImage& patch,
                                          const Epitome& epitome) {
  std::vector<int> all(epitome.channels);
  std::iota(all.begin(), all.end(), 0);
  check_channels(patch, epitome, all);
  return PatchScorer(epitome, patch.width(), std::move(all)).score(patch);
}

std::vector<double> descriptor_log_likelihoods(const PatchDescriptor& d,
                                               const DescriptorEpitome& de) {
  if (d.values.size() != static_cast<std::size_t>(de.dims)) {
    throw InvalidInput("descriptor length " + std::to_string(d.values.size()) +
                       " does not match descriptor epitome width " +
                       std::to_string(de.dims));
  }
  std::vector<double> out(de.mappings);
  for (int l = 0; l < de.mappings; ++l) {
    const auto mu = de.mean_row(l);
    const auto phi = de.variance_row(l);
    double sum = 0.0;
    for (int j = 0; j < de.dims; ++j) {
      sum += gaussian_log_density(d.values[j], mu[j], phi[j]);
    }
    out[l] = sum;
  }
  return out;
}

DescriptorScorer::DescriptorScorer(const DescriptorEpitome& de)
    : mappings_(de.mappings),
      dims_(de.dims),
      mean_(de.mu),
      inv_var_(de.phi.size()),
      constant_(de.mappings, 0.0) {
  for (int l = 0; l < mappings_; ++l) {
    double s = 0.0;
    for (int j = 0; j < dims_; ++j) {
      const std::size_t idx = static_cast<std::size_t>(l) * dims_ + j;
      inv_var_[idx] = 1.0 / de.phi[idx];
      s += std::log(2.0 * std::numbers::pi * de.phi[idx]);
    }
    constant_[l] = -0.5 * s;
  }
}

void DescriptorScorer::score(std::span<const double> descriptor,
                             std::span<double> out) const {
  if (descriptor.size() != static_cast<std::size_t>(dims_) ||
      out.size() != static_cast<std::size_t>(mappings_)) {
    throw InvalidInput("descriptor or output length mismatch");
  }
  for (int l = 0; l < mappings_; ++l) {
    const double* m = mean_.data() + static_cast<std::size_t>(l) * dims_;
    const double* w = inv_var_.data() + static_cast<std::size_t>(l) * dims_;
    double s = 0.0;
    for (int j = 0; j < dims_; ++j) {
      const double r = descriptor[j] - m[j];
      s += r * r * w[j];
    }
    out[l] = constant_[l] - 0.5 * s;
  }
}

std::vector<double> combined_log_likelihoods(std::span<const double> ll_yiq,
                                             std::span<const double> ll_dsift,
                                             double lambda) {
  if (ll_yiq.size() != ll_dsift.size()) {
    throw InvalidInput("likelihood vectors differ in length");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw InvalidInput("lambda must lie in [0, 1]");
  }
  std::vector<double> out(ll_yiq.size());
  for (std::size_t l = 0; l < out.size(); ++l) {
    out[l] = lambda * ll_yiq[l] + (1.0 - lambda) * ll_dsift[l];
  }
  return out;
}

}  // namespace epicolor
