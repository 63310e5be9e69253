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

#ifndef NEWSBURST_COMPOSE_HPP
#define NEWSBURST_COMPOSE_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "newsburst/cluster.hpp"
#include "newsburst/core.hpp"
#include "newsburst/embed.hpp"
#include "newsburst/image.hpp"
#include "newsburst/score.hpp"

namespace newsburst::compose {

inline constexpr std::size_t kDescriptionCap = 2000;

enum class FontTier { Large, Small };

struct CropRect {
  int x = 0;
  int y = 0;
  int side = 0;

  friend bool operator==(const CropRect&, const CropRect&) = default;
};

/// Frame colours: blue for national news, orange for international, yellow
/// for important news of either region.
struct Palette {
  image::Rgb blue{0x1E, 0x5A, 0xA8};
  image::Rgb orange{0xF0, 0x7D, 0x19};
  image::Rgb yellow{0xF7, 0xC8, 0x00};
};

struct FontRules {
  std::size_t large_max_chars = 60;  // titles up to this many characters use the large tier
  double large_pt = 64.0;            // sizes on a reference_canvas-pixel square
  double small_pt = 44.0;
  int reference_canvas = 1080;
  double frame_width_ratio = 0.04;
  double margin_ratio = 0.07;  // text margin from the outer edge
  double condense = 0.82;      // horizontal glyph scale
};

struct ImageSpec {
  std::string source_image_url;
  CropRect crop;
  image::Rgb frame_color;
  int frame_width = 0;
  std::string title_text;
  FontTier font_tier = FontTier::Large;
  double font_px = 0.0;
  double condense = 1.0;
  int margin_x = 0;  // title anchored bottom-left, this far from the edges
  int margin_y = 0;

  friend bool operator==(const ImageSpec&, const ImageSpec&) = default;
};

struct Post {
  std::string post_id;
  std::string representative_article_id;
  std::string title;
  std::string description;
  ImageSpec image;
  score::PostCategory category;
  std::string link;
  std::vector<std::string> hashtags;
  Timestamp created_at{};

  friend bool operator==(const Post&, const Post&) = default;
};

inline constexpr double kRepresentativeTieTolerance = 1e-12;

/// Member whose vector has the highest cosine similarity to the mean of all
/// member vectors. Cosines within kRepresentativeTieTolerance of the best
/// tie, and ties go to the smallest article_id.
std::string select_representative(std::span<const Article> members, std::span<const embed::ArticleVector> vectors);

/// Text before the first blank line (or the whole body). Longer than
/// kDescriptionCap characters: cut back to a word boundary and end with "…".
std::string first_paragraph(std::string_view body);

/// Centered square crop, frame colour by category (important wins over
/// region), font tier by title length.
ImageSpec compose_image_spec(const Article& article, const score::PostCategory& category, image::Dimensions dims,
                             const Palette& palette, const FontRules& rules);

/// Crops, frames and captions the source image; output is a PNG of side
/// spec.crop.side. Throws DecodeFailed when the bytes are not an image of
/// at least the cropped extent.
std::vector<std::uint8_t> render_image(const ImageSpec& spec, std::span<const std::uint8_t> image_bytes,
                                       const image::Font& font);

struct ComposeConfig {
  Palette palette;
  FontRules font_rules;
  std::filesystem::path placeholder_image;  // used when the lead image is absent or unusable
  std::vector<std::string> hashtags;
};

/// Fetches image bytes by URL; nullopt when unavailable.
using ImageLoader = std::function<std::optional<std::vector<std::uint8_t>>(const std::string& url)>;

std::string placeholder_url(const ComposeConfig& cfg);

/// Post for a cluster, represented by its centroid-nearest member. The
/// post_id derives from the representative, so re-runs over the same event
/// reproduce it.
Post build_post(const cluster::Cluster& cluster, std::span<const Article> articles,
                std::span<const embed::ArticleVector> vectors, const score::PostCategory& category,
                const ComposeConfig& cfg, Timestamp now, const ImageLoader& load_image);

std::string_view to_string(FontTier tier);

void to_json(nlohmann::json& j, const Post& p);
void from_json(const nlohmann::json& j, Post& p);
}  // namespace newsburst::compose

#endif  // NEWSBURST_COMPOSE_HPP
