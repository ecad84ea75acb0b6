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

#include "epicolor/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <utility>

#include "epicolor/errors.hpp"

namespace epicolor {

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

constexpr Mat3 invert(const Mat3& m) {
  const double c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
  const double c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
  const double c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
  const double det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
  Mat3 inv{};
  inv[0][0] = c00 / det;
  inv[1][0] = c01 / det;
  inv[2][0] = c02 / det;
  inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
  inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
  inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
  inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
  inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
  inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
  return inv;
}

constexpr Mat3 kYiqToRgb = invert(kRgbToYiq);

std::array<double, 3> apply(const Mat3& m, const std::array<double, 3>& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
          m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
          m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

void require_three(const RasterImage& img, ChannelSemantics want,
                   const char* op) {
  if (img.channels() != 3 || img.semantics() != want) {
    throw InvalidInput(std::string(op) + ": expected 3-channel " +
                       to_string(want) + " image, got " +
                       std::to_string(img.channels()) + "-channel " +
                       to_string(img.semantics()));
  }
}

}  // namespace

const char* to_string(ChannelSemantics semantics) {
  switch (semantics) {
    case ChannelSemantics::kRGB: return "RGB";
    case ChannelSemantics::kYIQ: return "YIQ";
    case ChannelSemantics::kY: return "Y";
    case ChannelSemantics::kIQ: return "IQ";
    case ChannelSemantics::kDescriptor: return "descriptor";
  }
  return "?";
}

RasterImage::RasterImage(int width, int height, int channels,
                         ChannelSemantics semantics)
    : RasterImage(width, height, channels, semantics,
                  std::vector<double>(
                      width > 0 && height > 0 && channels > 0
                          ? static_cast<std::size_t>(width) * height * channels
                          : 0)) {}

RasterImage::RasterImage(int width, int height, int channels,
                         ChannelSemantics semantics, std::vector<double> data)
    : width_(width),
      height_(height),
      channels_(channels),
      semantics_(semantics),
      data_(std::move(data)) {
  if (width < 1 || height < 1 || channels < 1) {
    throw InvalidInput("image dimensions must be positive");
  }
  if (data_.size() != static_cast<std::size_t>(width) * height * channels) {
    throw InvalidInput("image data length does not match width*height*channels");
  }
}

RasterImage RasterImage::channel(int ch, ChannelSemantics semantics) const {
  if (ch < 0 || ch >= channels_) {
    throw InvalidInput("channel index out of range");
  }
  RasterImage out(width_, height_, 1, semantics);
  for (int r = 0; r < height_; ++r)
    for (int c = 0; c < width_; ++c) out.at(r, c) = at(r, c, ch);
  return out;
}

std::array<double, 3> rgb_to_yiq(const std::array<double, 3>& rgb) {
  return apply(kRgbToYiq, rgb);
}

std::array<double, 3> yiq_to_rgb_unclamped(const std::array<double, 3>& yiq) {
  return apply(kYiqToRgb, yiq);
}

RasterImage rgb_to_yiq(const RasterImage& img) {
  require_three(img, ChannelSemantics::kRGB, "rgb_to_yiq");
  RasterImage out(img.width(), img.height(), 3, ChannelSemantics::kYIQ);
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); i += 3) {
    const auto yiq = rgb_to_yiq({src[i], src[i + 1], src[i + 2]});
    std::copy(yiq.begin(), yiq.end(), dst.begin() + i);
  }
  return out;
}

RasterImage yiq_to_rgb(const RasterImage& img) {
  require_three(img, ChannelSemantics::kYIQ, "yiq_to_rgb");
  RasterImage out(img.width(), img.height(), 3, ChannelSemantics::kRGB);
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); i += 3) {
    const auto rgb = yiq_to_rgb_unclamped({src[i], src[i + 1], src[i + 2]});
    for (int c = 0; c < 3; ++c) dst[i + c] = std::clamp(rgb[c], 0.0, 1.0);
  }
  return out;
}

RasterImage grayscale_as_luminance(const RasterImage& img) {
  if (img.channels() == 1 && (img.semantics() == ChannelSemantics::kY ||
                              img.semantics() == ChannelSemantics::kRGB)) {
    return RasterImage(img.width(), img.height(), 1, ChannelSemantics::kY,
                       std::vector<double>(img.data().begin(), img.data().end()));
  }
  if (img.channels() == 3 && img.semantics() == ChannelSemantics::kRGB) {
    RasterImage out(img.width(), img.height(), 1, ChannelSemantics::kY);
    auto src = img.data();
    auto dst = out.data();
    const auto& y = kRgbToYiq[0];
    for (std::size_t p = 0; p < dst.size(); ++p) {
      dst[p] = y[0] * src[3 * p] + y[1] * src[3 * p + 1] + y[2] * src[3 * p + 2];
    }
    return out;
  }
  throw InvalidInput(std::string("grayscale_as_luminance: unsupported ") +
                     std::to_string(img.channels()) + "-channel " +
                     to_string(img.semantics()) + " image");
}

std::uint8_t quantize_to_byte(double v) {
  const double scaled = std::round(v * 255.0);
  return static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
}

RasterImage load_image(const std::string& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw IoError(path + ": " + msg);
  }
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    throw IoError(path + ": 16-bit PNG is not supported");
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int channels = color ? 3 : 1;
  const int width = static_cast<int>(image.width);
  const int height = static_cast<int>(image.height);

  std::vector<png_byte> bytes(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, bytes.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw IoError(path + ": " + msg);
  }

  std::vector<double> data(bytes.size());
  std::transform(bytes.begin(), bytes.end(), data.begin(),
                 [](png_byte b) { return b / 255.0; });
  return RasterImage(width, height, channels,
                     color ? ChannelSemantics::kRGB : ChannelSemantics::kY,
                     std::move(data));
}

void save_image(const RasterImage& img, const std::string& path) {
  const bool gray = img.channels() == 1 && img.semantics() == ChannelSemantics::kY;
  const bool rgb = img.channels() == 3 && img.semantics() == ChannelSemantics::kRGB;
  if (!gray && !rgb) {
    throw InvalidInput(std::string("save_image: only Y or RGB images can be "
                                   "written, got ") +
                       to_string(img.semantics()));
  }

  std::vector<png_byte> bytes(img.data().size());
  std::transform(img.data().begin(), img.data().end(), bytes.begin(),
                 quantize_to_byte);

  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, bytes.data(), 0,
                               nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw IoError(path + ": " + msg);
  }
}

}  // namespace epicolor
