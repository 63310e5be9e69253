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

#include "newsburst/image.hpp"

#include <png.h>

#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>

#include <jpeglib.h>

#define STBTT_STATIC
#define STB_TRUETYPE_IMPLEMENTATION
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wunused-function"
#include "stb/stb_truetype.h"
#pragma GCC diagnostic pop

#include "newsburst/fetch.hpp"

namespace newsburst::image {

std::optional<Rgb> parse_hex_color(std::string_view text) {
  if (!text.empty() && text.front() == '#') text.remove_prefix(1);
  if (text.size() != 6) return std::nullopt;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::uint8_t out[3];
  for (int i = 0; i < 3; ++i) {
    const int hi = nibble(text[2 * i]);
    const int lo = nibble(text[2 * i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return Rgb{out[0], out[1], out[2]};
}

std::string to_hex(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02X%02X%02X", c.r, c.g, c.b);
  return buf;
}

Image::Image(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw PreconditionError("negative image size");
  pixels_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
  for (std::size_t i = 0; i < pixels_.size(); i += 3) {
    pixels_[i] = fill.r;
    pixels_[i + 1] = fill.g;
    pixels_[i + 2] = fill.b;
  }
}

Rgb Image::at(int x, int y) const {
  const std::size_t i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3;
  return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
}

void Image::set(int x, int y, Rgb c) {
  const std::size_t i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3;
  pixels_[i] = c.r;
  pixels_[i + 1] = c.g;
  pixels_[i + 2] = c.b;
}

// --- codecs ---------------------------------------------------------------

namespace {

bool is_png(std::span<const std::uint8_t> b) {
  static constexpr std::uint8_t kSig[] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  return b.size() >= 8 && std::memcmp(b.data(), kSig, 8) == 0;
}

bool is_jpeg(std::span<const std::uint8_t> b) {
  return b.size() >= 3 && b[0] == 0xFF && b[1] == 0xD8 && b[2] == 0xFF;
}

struct JpegError {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegError*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

void jpeg_silence(j_common_ptr, int) {}

// Decodes into `out` (RGB). Returns false with `message` set on failure.
bool read_jpeg(std::span<const std::uint8_t> bytes, bool header_only, Dimensions& dims,
               std::vector<std::uint8_t>& out, std::string& message) {
  jpeg_decompress_struct cinfo;
  JpegError err;
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = jpeg_error_exit;
  err.mgr.emit_message = jpeg_silence;
  if (setjmp(err.jump)) {
    message = err.message;
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  dims = {static_cast<int>(cinfo.image_width), static_cast<int>(cinfo.image_height)};
  if (!header_only) {
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    const std::size_t stride = static_cast<std::size_t>(cinfo.output_width) * 3;
    out.resize(stride * cinfo.output_height);
    while (cinfo.output_scanline < cinfo.output_height) {
      JSAMPROW row = out.data() + stride * cinfo.output_scanline;
      jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
  }
  jpeg_destroy_decompress(&cinfo);
  return true;
}

}  // namespace

Dimensions probe_dimensions(std::span<const std::uint8_t> bytes) {
  if (is_png(bytes)) {
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
      throw DecodeFailed(std::string("PNG header: ") + img.message);
    }
    Dimensions d{static_cast<int>(img.width), static_cast<int>(img.height)};
    png_image_free(&img);
    return d;
  }
  if (is_jpeg(bytes)) {
    Dimensions d;
    std::vector<std::uint8_t> unused;
    std::string message;
    if (!read_jpeg(bytes, true, d, unused, message)) throw DecodeFailed("JPEG header: " + message);
    return d;
  }
  throw DecodeFailed("unrecognised image format");
}

Image decode(std::span<const std::uint8_t> bytes) {
  if (is_png(bytes)) {
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
      throw DecodeFailed(std::string("PNG: ") + img.message);
    }
    img.format = PNG_FORMAT_RGB;
    Image out(static_cast<int>(img.width), static_cast<int>(img.height));
    png_color white{255, 255, 255};
    if (!png_image_finish_read(&img, &white, out.data().data(), 0, nullptr)) {
      std::string msg = img.message;
      png_image_free(&img);
      throw DecodeFailed("PNG: " + msg);
    }
    return out;
  }
  if (is_jpeg(bytes)) {
    Dimensions d;
    std::vector<std::uint8_t> rgb;
    std::string message;
    if (!read_jpeg(bytes, false, d, rgb, message)) throw DecodeFailed("JPEG: " + message);
    Image out(d.width, d.height);
    std::memcpy(out.data().data(), rgb.data(), std::min(rgb.size(), out.data().size()));
    return out;
  }
  throw DecodeFailed("unrecognised image format");
}

std::vector<std::uint8_t> encode_png(const Image& img) {
  png_image desc;
  std::memset(&desc, 0, sizeof desc);
  desc.version = PNG_IMAGE_VERSION;
  desc.width = static_cast<png_uint_32>(img.width());
  desc.height = static_cast<png_uint_32>(img.height());
  desc.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&desc, nullptr, &size, 0, img.data().data(), 0, nullptr)) {
    throw Error(std::string("PNG encode: ") + desc.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&desc, out.data(), &size, 0, img.data().data(), 0, nullptr)) {
    throw Error(std::string("PNG encode: ") + desc.message);
  }
  out.resize(size);
  return out;
}

// --- fonts ----------------------------------------------------------------

std::vector<std::uint32_t> utf8_codepoints(std::string_view text) {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < text.size();) {
    const auto c = static_cast<unsigned char>(text[i]);
    std::uint32_t cp = 0xFFFD;
    std::size_t len = 1;
    if (c < 0x80) {
      cp = c;
    } else if ((c >> 5) == 0x6 && i + 1 < text.size()) {
      cp = ((c & 0x1Fu) << 6) | (static_cast<unsigned char>(text[i + 1]) & 0x3Fu);
      len = 2;
    } else if ((c >> 4) == 0xE && i + 2 < text.size()) {
      cp = ((c & 0x0Fu) << 12) | ((static_cast<unsigned char>(text[i + 1]) & 0x3Fu) << 6) |
           (static_cast<unsigned char>(text[i + 2]) & 0x3Fu);
      len = 3;
    } else if ((c >> 3) == 0x1E && i + 3 < text.size()) {
      cp = ((c & 0x07u) << 18) | ((static_cast<unsigned char>(text[i + 1]) & 0x3Fu) << 12) |
           ((static_cast<unsigned char>(text[i + 2]) & 0x3Fu) << 6) | (static_cast<unsigned char>(text[i + 3]) & 0x3Fu);
      len = 4;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

struct Font::Impl {
  std::string data;
  stbtt_fontinfo info{};
};

Font::Font(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
Font::~Font() = default;
Font::Font(Font&&) noexcept = default;
Font& Font::operator=(Font&&) noexcept = default;

Font Font::load(const std::filesystem::path& path) {
  auto impl = std::make_unique<Impl>();
  try {
    impl->data = fetch::read_file(path);
  } catch (const IoError&) {
    throw FontMissing("font file not found: " + path.string());
  }
  const auto* bytes = reinterpret_cast<const unsigned char*>(impl->data.data());
  const int offset = stbtt_GetFontOffsetForIndex(bytes, 0);
  if (offset < 0 || !stbtt_InitFont(&impl->info, bytes, offset)) {
    throw FontMissing("not a usable TrueType font: " + path.string());
  }
  return Font(std::move(impl));
}

Font::Metrics Font::metrics(double em_px) const {
  int ascent = 0;
  int descent = 0;
  int gap = 0;
  stbtt_GetFontVMetrics(&impl_->info, &ascent, &descent, &gap);
  const double scale = stbtt_ScaleForMappingEmToPixels(&impl_->info, static_cast<float>(em_px));
  return {ascent * scale, descent * scale, gap * scale};
}

double Font::measure(std::string_view text, double em_px, double condense) const {
  const auto cps = utf8_codepoints(text);
  const double sx = stbtt_ScaleForMappingEmToPixels(&impl_->info, static_cast<float>(em_px)) * condense;
  double pen = 0.0;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const int glyph = stbtt_FindGlyphIndex(&impl_->info, static_cast<int>(cps[i]));
    int advance = 0;
    int lsb = 0;
    stbtt_GetGlyphHMetrics(&impl_->info, glyph, &advance, &lsb);
    pen += advance * sx;
    if (i + 1 < cps.size()) {
      pen += sx * stbtt_GetGlyphKernAdvance(&impl_->info, glyph,
                                            stbtt_FindGlyphIndex(&impl_->info, static_cast<int>(cps[i + 1])));
    }
  }
  return pen;
}

void Font::draw(Image& target, std::string_view text, double x, int baseline_y, double em_px, double condense,
                Rgb color) const {
  const auto cps = utf8_codepoints(text);
  const float sy = stbtt_ScaleForMappingEmToPixels(&impl_->info, static_cast<float>(em_px));
  const float sx = static_cast<float>(sy * condense);
  double pen = x;
  std::vector<unsigned char> bitmap;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const int glyph = stbtt_FindGlyphIndex(&impl_->info, static_cast<int>(cps[i]));
    int advance = 0;
    int lsb = 0;
    stbtt_GetGlyphHMetrics(&impl_->info, glyph, &advance, &lsb);
    const double origin = std::floor(pen);
    const auto shift = static_cast<float>(pen - origin);
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;
    stbtt_GetGlyphBitmapBoxSubpixel(&impl_->info, glyph, sx, sy, shift, 0.0f, &x0, &y0, &x1, &y1);
    const int w = x1 - x0;
    const int h = y1 - y0;
    if (w > 0 && h > 0) {
      bitmap.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
      stbtt_MakeGlyphBitmapSubpixel(&impl_->info, bitmap.data(), w, h, w, sx, sy, shift, 0.0f, glyph);
      for (int row = 0; row < h; ++row) {
        const int py = baseline_y + y0 + row;
        if (py < 0 || py >= target.height()) continue;
        for (int col = 0; col < w; ++col) {
          const int px = static_cast<int>(origin) + x0 + col;
          if (px < 0 || px >= target.width()) continue;
          const unsigned a = bitmap[static_cast<std::size_t>(row) * static_cast<std::size_t>(w) + static_cast<std::size_t>(col)];
          if (a == 0) continue;
          const Rgb bg = target.at(px, py);
          auto mix = [a](unsigned fg, unsigned back) {
            return static_cast<std::uint8_t>((fg * a + back * (255 - a) + 127) / 255);
          };
          target.set(px, py, {mix(color.r, bg.r), mix(color.g, bg.g), mix(color.b, bg.b)});
        }
      }
    }
    pen += advance * sx;
    if (i + 1 < cps.size()) {
      pen += sx * stbtt_GetGlyphKernAdvance(&impl_->info, glyph,
                                            stbtt_FindGlyphIndex(&impl_->info, static_cast<int>(cps[i + 1])));
    }
  }
}

}  // namespace newsburst::image
