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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace epicolor {

enum class ChannelSemantics { kRGB, kYIQ, kY, kIQ, kDescriptor };

const char* to_string(ChannelSemantics semantics);

/// Row-major, channel-interleaved image of doubles. Element (row, col, ch)
/// lives at ((row * width) + col) * channels + ch.
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height, int channels, ChannelSemantics semantics);
  RasterImage(int width, int height, int channels, ChannelSemantics semantics,
              std::vector<double> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  ChannelSemantics semantics() const { return semantics_; }
  bool empty() const { return data_.empty(); }

  double& at(int row, int col, int ch = 0) {
    return data_[index(row, col, ch)];
  }
  double at(int row, int col, int ch = 0) const {
    return data_[index(row, col, ch)];
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  // Copies one channel out as a single-channel image with the given semantics.
  RasterImage channel(int ch, ChannelSemantics semantics) const;

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  std::size_t index(int row, int col, int ch) const {
    return (static_cast<std::size_t>(row) * width_ + col) * channels_ + ch;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  ChannelSemantics semantics_ = ChannelSemantics::kY;
  std::vector<double> data_;
};

// FCC NTSC forward matrix, rows Y, I, Q.
inline constexpr std::array<std::array<double, 3>, 3> kRgbToYiq = {{
    {0.299, 0.587, 0.114},
    {0.595716, -0.274453, -0.321263},
    {0.211456, -0.522591, 0.311135},
}};

// Extremes of I and Q over the RGB unit cube.
inline constexpr double kIMax = 0.595716;
inline constexpr double kQMax = 0.522591;

std::array<double, 3> rgb_to_yiq(const std::array<double, 3>& rgb);
// Exact inverse of kRgbToYiq, no clamping.
std::array<double, 3> yiq_to_rgb_unclamped(const std::array<double, 3>& yiq);

RasterImage rgb_to_yiq(const RasterImage& img);
// Inverse conversion followed by clamping each RGB channel to [0, 1].
RasterImage yiq_to_rgb(const RasterImage& img);

// Single-channel luminance. Y images pass through unchanged (semantics
// normalized to kY); RGB images are reduced with the Y row of kRgbToYiq.
RasterImage grayscale_as_luminance(const RasterImage& img);

// 8-bit PNG I/O. Byte v maps to v / 255 on load; values are written as
// round(v * 255) clamped to [0, 255]. Gray loads as kY, color as kRGB.
RasterImage load_image(const std::string& path);
void save_image(const RasterImage& img, const std::string& path);

std::uint8_t quantize_to_byte(double v);

}  // namespace epicolor
