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

#include "newsburst/compose.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

namespace newsburst::compose {

std::string_view to_string(FontTier tier) { return tier == FontTier::Large ? "Large" : "Small"; }

std::string select_representative(std::span<const Article> members, std::span<const embed::ArticleVector> vectors) {
  if (members.empty()) throw PreconditionError("cannot pick a representative of an empty cluster");
  std::map<std::string_view, const Eigen::VectorXd*> by_id;
  for (const auto& v : vectors) by_id.emplace(v.article_id, &v.v);

  std::vector<const Eigen::VectorXd*> member_vectors;
  for (const auto& a : members) {
    auto it = by_id.find(a.article_id);
    if (it == by_id.end()) throw PreconditionError("no vector for cluster member " + a.article_id);
    member_vectors.push_back(it->second);
  }
  const Eigen::Index dim = member_vectors.front()->size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  for (const auto* v : member_vectors) {
    for (Eigen::Index i = 0; i < dim; ++i) mean[i] += (*v)[i];
  }
  for (Eigen::Index i = 0; i < dim; ++i) mean[i] /= static_cast<double>(member_vectors.size());

  auto dot = [dim](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) s += a[i] * b[i];
    return s;
  };
  const double mean_norm = std::sqrt(dot(mean, mean));

  std::vector<double> cosines;
  for (const auto* v : member_vectors) {
    const double norm = std::sqrt(dot(*v, *v));
    // A zero mean or zero vector has no direction; such members tie.
    cosines.push_back((mean_norm == 0.0 || norm == 0.0) ? 0.0 : dot(*v, mean) / (norm * mean_norm));
  }
  const double top = *std::max_element(cosines.begin(), cosines.end());
  std::size_t best = members.size();
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (cosines[k] < top - kRepresentativeTieTolerance) continue;
    if (best == members.size() || members[k].article_id < members[best].article_id) best = k;
  }
  return members[best].article_id;
}

std::string first_paragraph(std::string_view body) {
  std::size_t end = body.size();
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] != '\n') continue;
    std::size_t j = i + 1;
    while (j < body.size() && (body[j] == ' ' || body[j] == '\t' || body[j] == '\r')) ++j;
    if (j < body.size() && body[j] == '\n') {
      end = i;
      break;
    }
  }
  std::string para(body.substr(0, end));
  auto rtrim = [](std::string& s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  };
  rtrim(para);
  if (utf8_length(para) <= kDescriptionCap) return para;

  std::size_t cut = utf8_offset(para, kDescriptionCap);
  if (!std::isspace(static_cast<unsigned char>(para[cut]))) {
    const std::size_t space = para.find_last_of(" \t\n", cut);
    if (space != std::string::npos && space > 0) cut = space;
  }
  para.resize(cut);
  rtrim(para);
  return para + "…";
}

ImageSpec compose_image_spec(const Article& article, const score::PostCategory& category, image::Dimensions dims,
                             const Palette& palette, const FontRules& rules) {
  if (dims.width < 1 || dims.height < 1) throw PreconditionError("image dimensions must be positive");
  ImageSpec spec;
  spec.source_image_url = article.image_url.value_or("");
  const int side = std::min(dims.width, dims.height);
  spec.crop = CropRect{(dims.width - side) / 2, (dims.height - side) / 2, side};
  if (category.important) {
    spec.frame_color = palette.yellow;
  } else {
    spec.frame_color = category.region == Region::National ? palette.blue : palette.orange;
  }
  spec.frame_width = std::min(std::max(1, static_cast<int>(std::lround(side * rules.frame_width_ratio))), side / 2);
  spec.title_text = article.title;
  spec.font_tier = utf8_length(article.title) <= rules.large_max_chars ? FontTier::Large : FontTier::Small;
  const double pt = spec.font_tier == FontTier::Large ? rules.large_pt : rules.small_pt;
  spec.font_px = pt * side / rules.reference_canvas;
  spec.condense = rules.condense;
  const int margin = std::max(spec.frame_width + 1, static_cast<int>(std::lround(side * rules.margin_ratio)));
  spec.margin_x = margin;
  spec.margin_y = margin;
  return spec;
}

namespace {

std::vector<std::string> wrap_words(const image::Font& font, std::string_view text, double em_px, double condense,
                                    double max_width) {
  std::vector<std::string> words;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    std::size_t end = pos;
    while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
    if (end > pos) words.emplace_back(text.substr(pos, end - pos));
    pos = end;
  }
  std::vector<std::string> lines;
  std::string current;
  for (const auto& w : words) {
    std::string candidate = current.empty() ? w : current + " " + w;
    if (!current.empty() && font.measure(candidate, em_px, condense) > max_width) {
      lines.push_back(std::move(current));
      current = w;
    } else {
      current = std::move(candidate);
    }
  }
  if (!current.empty()) lines.push_back(std::move(current));
  return lines;
}

}  // namespace

std::vector<std::uint8_t> render_image(const ImageSpec& spec, std::span<const std::uint8_t> image_bytes,
                                       const image::Font& font) {
  const image::Image source = image::decode(image_bytes);
  const auto& c = spec.crop;
  if (c.side < 1 || c.x < 0 || c.y < 0 || c.x + c.side > source.width() || c.y + c.side > source.height()) {
    throw image::DecodeFailed("decoded image " + std::to_string(source.width()) + "x" +
                              std::to_string(source.height()) + " does not contain the requested crop");
  }
  const int side = c.side;
  image::Image out(side, side);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) out.set(x, y, source.at(c.x + x, c.y + y));
  }

  // Darken the lower part so the caption stays legible on bright photos.
  const int scrim_top = side * 11 / 20;
  for (int y = scrim_top; y < side; ++y) {
    const int fade = (y - scrim_top) * 140 / std::max(1, side - scrim_top);  // 0..140 of 256
    const int keep = 256 - fade;
    for (int x = 0; x < side; ++x) {
      const image::Rgb p = out.at(x, y);
      auto dim = [keep](std::uint8_t v) { return static_cast<std::uint8_t>((v * keep + 128) >> 8); };
      out.set(x, y, {dim(p.r), dim(p.g), dim(p.b)});
    }
  }

  const int fw = spec.frame_width;
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      if (x < fw || y < fw || x >= side - fw || y >= side - fw) out.set(x, y, spec.frame_color);
    }
  }

  if (!spec.title_text.empty() && spec.font_px > 0.0) {
    const double max_width = side - 2.0 * spec.margin_x;
    auto lines = wrap_words(font, spec.title_text, spec.font_px, spec.condense, max_width);
    const auto m = font.metrics(spec.font_px);
    const double line_height = m.ascent - m.descent + m.line_gap;
    const auto max_lines = static_cast<std::size_t>(std::max(1.0, std::floor(side * 0.45 / line_height)));
    if (lines.size() > max_lines) {
      lines.resize(max_lines);
      lines.back() += "…";
    }
    double baseline = side - spec.margin_y + m.descent;
    for (std::size_t i = lines.size(); i-- > 0;) {
      const int y = static_cast<int>(std::lround(baseline));
      font.draw(out, lines[i], spec.margin_x + 2, y + 2, spec.font_px, spec.condense, {0, 0, 0});
      font.draw(out, lines[i], spec.margin_x, y, spec.font_px, spec.condense, {255, 255, 255});
      baseline -= line_height;
    }
  }
  return image::encode_png(out);
}

std::string placeholder_url(const ComposeConfig& cfg) {
  return "file://" + std::filesystem::absolute(cfg.placeholder_image).lexically_normal().string();
}

Post build_post(const cluster::Cluster& cluster, std::span<const Article> articles,
                std::span<const embed::ArticleVector> vectors, const score::PostCategory& category,
                const ComposeConfig& cfg, Timestamp now, const ImageLoader& load_image) {
  std::vector<Article> members;
  for (const auto& id : cluster.members) {
    auto it = std::find_if(articles.begin(), articles.end(), [&](const Article& a) { return a.article_id == id; });
    if (it == articles.end()) throw PreconditionError("cluster member " + id + " not among the articles");
    members.push_back(*it);
  }
  const std::string rep_id = select_representative(members, vectors);
  const Article& rep = *std::find_if(members.begin(), members.end(),
                                     [&](const Article& a) { return a.article_id == rep_id; });

  std::string image_url;
  std::optional<image::Dimensions> dims;
  if (rep.image_url) {
    if (auto bytes = load_image(*rep.image_url)) {
      try {
        dims = image::probe_dimensions(*bytes);
        image_url = *rep.image_url;
      } catch (const image::DecodeFailed&) {
        dims.reset();
      }
    }
  }
  if (!dims) {
    image_url = placeholder_url(cfg);
    auto bytes = load_image(image_url);
    if (!bytes) throw image::DecodeFailed("placeholder image unavailable: " + cfg.placeholder_image.string());
    dims = image::probe_dimensions(*bytes);
  }

  Post post;
  post.representative_article_id = rep.article_id;
  post.post_id = "p" + sha256_hex("post:" + rep.article_id).substr(0, 16);
  post.title = rep.title;
  post.description = first_paragraph(rep.body);
  if (post.description.empty()) post.description = rep.perex.empty() ? rep.title : rep.perex;
  post.image = compose_image_spec(rep, category, *dims, cfg.palette, cfg.font_rules);
  post.image.source_image_url = image_url;
  post.category = category;
  post.link = rep.url;
  post.hashtags = cfg.hashtags;
  post.created_at = now;
  return post;
}

void to_json(nlohmann::json& j, const Post& p) {
  const auto& s = p.image;
  j = nlohmann::json{
      {"post_id", p.post_id},
      {"representative_article_id", p.representative_article_id},
      {"title", p.title},
      {"description", p.description},
      {"image",
       {{"source_image_url", s.source_image_url},
        {"crop", {{"x", s.crop.x}, {"y", s.crop.y}, {"side", s.crop.side}}},
        {"frame_color", image::to_hex(s.frame_color)},
        {"frame_width", s.frame_width},
        {"title_text", s.title_text},
        {"font_tier", to_string(s.font_tier)},
        {"font_px", s.font_px},
        {"condense", s.condense},
        {"margin_x", s.margin_x},
        {"margin_y", s.margin_y}}},
      {"category", {{"region", newsburst::to_string(p.category.region)}, {"important", p.category.important}}},
      {"link", p.link},
      {"hashtags", p.hashtags},
      {"created_at", format_iso8601(p.created_at)}};
}

void from_json(const nlohmann::json& j, Post& p) {
  j.at("post_id").get_to(p.post_id);
  j.at("representative_article_id").get_to(p.representative_article_id);
  j.at("title").get_to(p.title);
  j.at("description").get_to(p.description);
  const auto& s = j.at("image");
  p.image.source_image_url = s.at("source_image_url").get<std::string>();
  p.image.crop = CropRect{s.at("crop").at("x").get<int>(), s.at("crop").at("y").get<int>(),
                          s.at("crop").at("side").get<int>()};
  auto color = image::parse_hex_color(s.at("frame_color").get<std::string>());
  if (!color) throw nlohmann::json::other_error::create(501, "bad frame_color", &j);
  p.image.frame_color = *color;
  s.at("frame_width").get_to(p.image.frame_width);
  s.at("title_text").get_to(p.image.title_text);
  p.image.font_tier = s.at("font_tier").get<std::string>() == "Large" ? FontTier::Large : FontTier::Small;
  s.at("font_px").get_to(p.image.font_px);
  s.at("condense").get_to(p.image.condense);
  s.at("margin_x").get_to(p.image.margin_x);
  s.at("margin_y").get_to(p.image.margin_y);
  auto region = parse_region(j.at("category").at("region").get<std::string>());
  if (!region) throw nlohmann::json::other_error::create(501, "bad region", &j);
  p.category.region = *region;
  j.at("category").at("important").get_to(p.category.important);
  j.at("link").get_to(p.link);
  j.at("hashtags").get_to(p.hashtags);
  auto created = parse_iso8601(j.at("created_at").get<std::string>());
  if (!created) throw nlohmann::json::other_error::create(501, "bad created_at", &j);
  p.created_at = *created;
}

}  // namespace newsburst::compose
