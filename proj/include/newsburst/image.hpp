// Copyright 2026 The newsburst Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NEWSBURST_IMAGE_HPP
#define NEWSBURST_IMAGE_HPP

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "newsburst/core.hpp"

namespace newsburst::image {

class DecodeFailed : public Error {
 public:
  using Error::Error;
};

class FontMissing : public Error {
 public:
  using Error::Error;
};

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// "#RRGGBB" (the '#' is optional).
std::optional<Rgb> parse_hex_color(std::string_view text);
std::string to_hex(Rgb c);

struct Dimensions {
  int width = 0;
  int height = 0;

  friend bool operator==(const Dimensions&, const Dimensions&) = default;
};

/// 8-bit RGB raster, row-major.
class Image {
 public:
  Image() = default;
  Image(int width, int height, Rgb fill = {});

  int width() const { return width_; }
  int height() const { return height_; }
  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);
  std::span<std::uint8_t> data() { return pixels_; }
  std::span<const std::uint8_t> data() const { return pixels_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Reads only the header. PNG and JPEG.
Dimensions probe_dimensions(std::span<const std::uint8_t> bytes);
/// PNG or JPEG to RGB; alpha is composited over white.
Image decode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_png(const Image& img);

/// A TrueType face for rasterizing titles.
class Font {
 public:
  static Font load(const std::filesystem::path& path);
  ~Font();
  Font(Font&&) noexcept;
  Font& operator=(Font&&) noexcept;

  /// Draws UTF-8 `text` with its baseline starting at (x, baseline_y),
  /// blending `color` by glyph coverage. `em_px` is the em size in pixels and
  /// `condense` scales glyphs horizontally.
  void draw(Image& target, std::string_view text, double x, int baseline_y, double em_px, double condense,
            Rgb color) const;
  double measure(std::string_view text, double em_px, double condense) const;
  /// Ascent, descent (negative) and line gap in pixels at `em_px`.
  struct Metrics {
    double ascent;
    double descent;
    double line_gap;
  };
  Metrics metrics(double em_px) const;

 private:
  struct Impl;
  explicit Font(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

std::vector<std::uint32_t> utf8_codepoints(std::string_view text);

}  // namespace newsburst::image

#endif  // NEWSBURST_IMAGE_HPP
