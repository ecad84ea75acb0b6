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

#include "epicolor/colorize.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "epicolor/errors.hpp"
#include "parallel.hpp"

namespace epicolor {

int argmax_lowest(std::span<const double> scores) {
  if (scores.empty()) throw InvalidInput("argmax of an empty score vector");
  int best = 0;
  for (std::size_t l = 1; l < scores.size(); ++l) {
    if (scores[l] > scores[best]) best = static_cast<int>(l);
  }
  return best;
}

MappingInference::MappingInference(const DualEpitome& model)
    : log_pi_((model.validate(), model.prior.log_pi)),
      lambda_(model.lambda),
      luminance_(model.yiq, model.patch_size, {0}),
      descriptor_(model.dsift) {}

std::vector<double> MappingInference::scores(
    const RasterImage& patch_y, const PatchDescriptor& descriptor) const {
  const int mappings = static_cast<int>(log_pi_.size());
  std::vector<double> ll_y(mappings), ll_d(mappings);
  luminance_.score(patch_y, ll_y);
  descriptor_.score(descriptor.values, ll_d);
  std::vector<double> out(mappings);
  for (int l = 0; l < mappings; ++l) {
    out[l] = log_pi_[l] + (lambda_ * ll_y[l] + (1.0 - lambda_) * ll_d[l]);
  }
  return out;
}

int MappingInference::best_mapping(const RasterImage& patch_y,
                                   const PatchDescriptor& descriptor) const {
  return argmax_lowest(scores(patch_y, descriptor));
}

int best_mapping(const RasterImage& patch_y, const PatchDescriptor& descriptor,
                 const DualEpitome& model) {
  return MappingInference(model).best_mapping(patch_y, descriptor);
}

RasterImage transfer_chroma(const RasterImage& target_y, const PatchGrid& grid,
                            std::span<const int> mappings,
                            const DualEpitome& model) {
  if (target_y.channels() != 1) {
    throw InvalidInput("transfer_chroma needs a single-channel luminance image");
  }
  if (mappings.size() != grid.count()) {
    throw InvalidInput("transfer_chroma needs one mapping per grid anchor");
  }
  const Epitome& e = model.yiq;
  if (e.channels != 3) throw InvalidInput("model is not a YIQ epitome");
  const int h = target_y.height();
  const int w = target_y.width();
  const int k = grid.patch_size;
  const std::size_t pixels = static_cast<std::size_t>(h) * w;
  std::vector<double> sum_i(pixels, 0.0), sum_q(pixels, 0.0), count(pixels, 0.0);

  for (std::size_t p = 0; p < grid.count(); ++p) {
    const Anchor a = grid.anchors[p];
    const int l = mappings[p];
    if (l < 0 || l >= e.mappings()) throw InvalidInput("mapping index out of range");
    if (a.row < 0 || a.col < 0 || a.row + k > h || a.col + k > w) {
      throw InvalidInput("grid anchor leaves the target image");
    }
    for (int dr = 0; dr < k; ++dr) {
      for (int dc = 0; dc < k; ++dc) {
        const auto [er, ec] = mapping_coords(l, dr, dc, e.rows, e.cols);
        const std::size_t px = static_cast<std::size_t>(a.row + dr) * w + a.col + dc;
        sum_i[px] += e.mean(er, ec, 1);
        sum_q[px] += e.mean(er, ec, 2);
        count[px] += 1.0;
      }
    }
  }

  RasterImage out(w, h, 3, ChannelSemantics::kYIQ);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t px = static_cast<std::size_t>(r) * w + c;
      if (count[px] == 0.0) {
        throw InternalError("pixel (" + std::to_string(r) + ", " +
                            std::to_string(c) + ") is not covered by any patch");
      }
      out.at(r, c, 0) = target_y.at(r, c);
      out.at(r, c, 1) = sum_i[px] / count[px];
      out.at(r, c, 2) = sum_q[px] / count[px];
    }
  }
  return out;
}

RasterImage remap_luminance(const RasterImage& target_y, const Epitome& epitome) {
  if (target_y.channels() != 1) {
    throw InvalidInput("remap_luminance needs a single-channel image");
  }
  // Reference moments: uniform mixture of the per-location Y Gaussians.
  const std::size_t locations = static_cast<std::size_t>(epitome.mappings());
  double ref_mean = 0.0, ref_second = 0.0;
  for (std::size_t j = 0; j < locations; ++j) {
    const double m = epitome.mu[j * epitome.channels];
    ref_mean += m;
    ref_second += epitome.phi[j * epitome.channels] + m * m;
  }
  ref_mean /= static_cast<double>(locations);
  const double ref_var =
      std::max(ref_second / static_cast<double>(locations) - ref_mean * ref_mean, 0.0);

  const auto px = target_y.data();
  double mean = 0.0;
  for (double v : px) mean += v;
  mean /= static_cast<double>(px.size());
  double var = 0.0;
  for (double v : px) var += (v - mean) * (v - mean);
  var /= static_cast<double>(px.size());

  // Rounding leaves a tiny nonzero variance on flat images; treat it as zero.
  constexpr double kFlatVariance = 1e-12;
  const double scale = var > kFlatVariance ? std::sqrt(ref_var / var) : 1.0;
  RasterImage out = target_y;
  for (double& v : out.data()) v = ref_mean + scale * (v - mean);
  return out;
}

RasterImage colorize_yiq(const RasterImage& target_gray, const DualEpitome& model,
                         const ColorizeOptions& options) {
  const RasterImage target_y = grayscale_as_luminance(target_gray);
  const int k = model.patch_size;
  if (target_y.width() < k || target_y.height() < k) {
    throw InvalidInput("target image " + std::to_string(target_y.width()) + "x" +
                       std::to_string(target_y.height()) +
                       " is smaller than the model patch size " + std::to_string(k));
  }
  const RasterImage matched =
      options.luma_remap ? remap_luminance(target_y, model.yiq) : target_y;
  const PatchGrid grid = sample_grid(matched.width(), matched.height(), k, options.omega);
  const MappingInference inference(model);

  std::vector<int> mappings(grid.count());
  detail::parallel_for(grid.count(), options.threads, [&](std::size_t p) {
    const RasterImage patch = extract_patch(matched, grid.anchors[p], k);
    mappings[p] = inference.best_mapping(patch, patch_descriptor(patch, model.descriptor_grid));
  });
  return transfer_chroma(target_y, grid, mappings, model);
}

RasterImage colorize(const RasterImage& target_gray, const DualEpitome& model,
                     const ColorizeOptions& options) {
  return yiq_to_rgb(colorize_yiq(target_gray, model, options));
}

}  // namespace epicolor
