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

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "newsburst/compose.hpp"
#include "newsburst/fetch.hpp"
#include "test_support.hpp"

namespace nb = newsburst;
namespace compose = newsburst::compose;
namespace image = newsburst::image;
using nb::testing::at;
using nb::testing::make_article;
using nb::testing::vec;

namespace {

const nb::score::PostCategory kNational{nb::Region::National, false};
const nb::score::PostCategory kInternational{nb::Region::International, false};

const image::Font& font() {
  static const image::Font f = image::Font::load(nb::testing::asset_dir() / "fonts/DejaVuSans-Bold.ttf");
  return f;
}

std::vector<std::uint8_t> gray_png(int w, int h) { return image::encode_png(image::Image(w, h, {128, 128, 128})); }

nb::Article titled(std::string title) {
  return make_article("r", "s", at("2020-10-01T00:00:00Z"), "body", std::move(title));
}

}  // namespace

// --- select_representative -------------------------------------------------

TEST(Representative, IdenticalVectorsPickSmallestId) {
  const auto t = at("2020-10-01T00:00:00Z");
  const std::vector<nb::Article> m{make_article("c", "s", t), make_article("a", "s", t), make_article("b", "s", t)};
  const std::vector<nb::embed::ArticleVector> v{vec("a", {0.6, 0.8}), vec("b", {0.6, 0.8}), vec("c", {0.6, 0.8})};
  EXPECT_EQ(compose::select_representative(m, v), "a");
}

TEST(Representative, CentroidNearestWins) {
  const auto t = at("2020-10-01T00:00:00Z");
  const std::vector<nb::Article> m{make_article("x", "s", t), make_article("y", "s", t), make_article("z", "s", t)};
  const std::vector<nb::embed::ArticleVector> v{vec("x", {1, 0}), vec("y", {0, 1}), vec("z", {0.7071, 0.7071})};
  EXPECT_EQ(compose::select_representative(m, v), "z");
}

TEST(Representative, Singleton) {
  const std::vector<nb::Article> m{make_article("only", "s", at("2020-10-01T00:00:00Z"))};
  const std::vector<nb::embed::ArticleVector> v{vec("only", {1, 0})};
  EXPECT_EQ(compose::select_representative(m, v), "only");
}

TEST(Representative, Preconditions) {
  const std::vector<nb::Article> m{make_article("a", "s", at("2020-10-01T00:00:00Z"))};
  const std::vector<nb::embed::ArticleVector> none;
  EXPECT_THROW(compose::select_representative(m, none), nb::PreconditionError);
  EXPECT_THROW(compose::select_representative({}, none), nb::PreconditionError);
}

// --- first_paragraph -----------------------------------------------------------

TEST(FirstParagraph, StopsAtBlankLine) {
  EXPECT_EQ(compose::first_paragraph("P1.\n\nP2."), "P1.");
  EXPECT_EQ(compose::first_paragraph("P1.\n \t\nP2."), "P1.");
  EXPECT_EQ(compose::first_paragraph("Line one\nline two\n\nP2."), "Line one\nline two");
}

TEST(FirstParagraph, WholeBodyWithoutBlankLine) {
  const std::string body(100, 'x');
  EXPECT_EQ(compose::first_paragraph(body), body);
}

TEST(FirstParagraph, CapsLongParagraphsAtAWordBoundary) {
  std::string body;
  while (nb::utf8_length(body) < 2500) body += "slovíčko ";
  const auto out = compose::first_paragraph(body);
  EXPECT_LE(nb::utf8_length(out), 2001u);
  EXPECT_TRUE(out.ends_with("slovíčko…"));
  const auto stem = out.substr(0, out.size() - std::string("…").size());
  EXPECT_TRUE(body.starts_with(stem));
}

TEST(FirstParagraphProperty, PrefixOfBody) {
  nb::testing::Gen gen(12);
  for (int i = 0; i < 500; ++i) {
    std::string body = gen.text(40);
    if (gen.chance(0.5)) body += "\n\n" + gen.text(10);
    if (gen.chance(0.1)) {
      while (body.size() < 6000) body += " " + gen.text(50);
    }
    auto out = compose::first_paragraph(body);
    if (out.ends_with("…") && !body.starts_with(out)) out.resize(out.size() - std::string("…").size());
    EXPECT_TRUE(body.starts_with(out));
    EXPECT_LE(nb::utf8_length(out), 2001u);
  }
}

// --- compose_image_spec ----------------------------------------------------------

TEST(ImageSpec, LandscapeCenterCropNationalBlue) {
  const auto s = compose::compose_image_spec(titled("Krátký titulek"), kNational, {800, 600}, {}, {});
  EXPECT_EQ(s.crop, (compose::CropRect{100, 0, 600}));
  EXPECT_EQ(s.frame_color, compose::Palette{}.blue);
  EXPECT_EQ(s.font_tier, compose::FontTier::Large);
  EXPECT_EQ(s.title_text, "Krátký titulek");
}

TEST(ImageSpec, SquareIsIdentityCrop) {
  const auto s = compose::compose_image_spec(titled("x"), kInternational, {500, 500}, {}, {});
  EXPECT_EQ(s.crop, (compose::CropRect{0, 0, 500}));
  EXPECT_EQ(s.frame_color, compose::Palette{}.orange);
}

TEST(ImageSpec, ImportantIsYellowForBothRegions) {
  const auto a = compose::compose_image_spec(titled("x"), {nb::Region::National, true}, {500, 700}, {}, {});
  const auto b = compose::compose_image_spec(titled("x"), {nb::Region::International, true}, {500, 700}, {}, {});
  EXPECT_EQ(a.frame_color, compose::Palette{}.yellow);
  EXPECT_EQ(b.frame_color, compose::Palette{}.yellow);
  EXPECT_EQ(a.crop, (compose::CropRect{0, 100, 500}));
}

TEST(ImageSpec, FontTierByCharacterCount) {
  const std::string sixty = std::string(58, 'a') + "čř";
  EXPECT_EQ(compose::compose_image_spec(titled(sixty), kNational, {1080, 1080}, {}, {}).font_tier,
            compose::FontTier::Large);
  const auto small = compose::compose_image_spec(titled(sixty + "x"), kNational, {1080, 1080}, {}, {});
  EXPECT_EQ(small.font_tier, compose::FontTier::Small);
  EXPECT_DOUBLE_EQ(small.font_px, 44.0);
}

TEST(ImageSpec, RejectsEmptyDimensions) {
  EXPECT_THROW(compose::compose_image_spec(titled("x"), kNational, {0, 10}, {}, {}), nb::PreconditionError);
}

TEST(ImageSpecProperty, CropInBoundsAndSquare) {
  nb::testing::Gen gen(13);
  for (int i = 0; i < 5000; ++i) {
    const int w = static_cast<int>(gen.range(1, 5000));
    const int h = static_cast<int>(gen.range(1, 5000));
    const auto s = compose::compose_image_spec(titled("t"), kNational, {w, h}, {}, {});
    EXPECT_EQ(s.crop.side, std::min(w, h));
    EXPECT_GE(s.crop.x, 0);
    EXPECT_GE(s.crop.y, 0);
    EXPECT_LE(s.crop.x + s.crop.side, w);
    EXPECT_LE(s.crop.y + s.crop.side, h);
    EXPECT_GE(s.frame_width, s.crop.side >= 2 ? 1 : 0);
    EXPECT_LE(2 * s.frame_width, s.crop.side);
  }
}

TEST(ImageSpecProperty, ScalesWithTheCanvas) {
  const auto a = compose::compose_image_spec(titled("t"), kNational, {540, 540}, {}, {});
  const auto b = compose::compose_image_spec(titled("t"), kNational, {1080, 1080}, {}, {});
  EXPECT_DOUBLE_EQ(b.font_px, 2 * a.font_px);
  EXPECT_NEAR(b.frame_width, 2 * a.frame_width, 1);
  EXPECT_NEAR(b.margin_x, 2 * a.margin_x, 1);
}

// --- render_image ----------------------------------------------------------------

TEST(Render, DeterministicSquareWithInsetFrame) {
  const auto src = gray_png(800, 600);
  const auto spec = compose::compose_image_spec(titled("Vláda schválila rozpočet"), kNational, {800, 600}, {}, {});
  const auto png1 = compose::render_image(spec, src, font());
  const auto png2 = compose::render_image(spec, src, font());
  EXPECT_EQ(png1, png2);
  const auto out = image::decode(png1);
  ASSERT_EQ(out.width(), 600);
  ASSERT_EQ(out.height(), 600);
  EXPECT_EQ(out.at(0, 0), compose::Palette{}.blue);
  EXPECT_EQ(out.at(spec.frame_width - 1, 300), compose::Palette{}.blue);
  EXPECT_EQ(out.at(300, 100), (image::Rgb{128, 128, 128}));
  // Bottom band is darkened and carries white title pixels.
  bool has_white = false;
  for (int y = 420; y < 600 - spec.frame_width; ++y)
    for (int x = spec.frame_width; x < 300; ++x)
      if (out.at(x, y) == image::Rgb{255, 255, 255}) has_white = true;
  EXPECT_TRUE(has_white);
  EXPECT_LT(out.at(590 - spec.frame_width, 590 - spec.frame_width).r, 128);
}

TEST(Render, LongTitleStaysInsideTheCanvas) {
  std::string title;
  for (int i = 0; i < 40; ++i) title += "dlouhý ";
  const auto spec = compose::compose_image_spec(titled(title), kNational, {400, 400}, {}, {});
  const auto out = image::decode(compose::render_image(spec, gray_png(400, 400), font()));
  EXPECT_EQ(out.width(), 400);
  // Nothing is drawn into the top part of the image.
  for (int x = spec.frame_width; x < 400 - spec.frame_width; ++x) EXPECT_EQ(out.at(x, 150), (image::Rgb{128, 128, 128}));
}

TEST(Render, CorruptBytesFailToDecode) {
  const auto spec = compose::compose_image_spec(titled("x"), kNational, {100, 100}, {}, {});
  const std::vector<std::uint8_t> junk{1, 2, 3, 4, 5};
  EXPECT_THROW(compose::render_image(spec, junk, font()), image::DecodeFailed);
  // Image smaller than the crop the spec was made for.
  EXPECT_THROW(compose::render_image(spec, gray_png(50, 50), font()), image::DecodeFailed);
}

TEST(Render, MissingFontFile) {
  EXPECT_THROW(image::Font::load("/nonexistent/font.ttf"), image::FontMissing);
}

// --- build_post ------------------------------------------------------------------

namespace {

struct PostFixture {
  std::vector<nb::Article> articles;
  std::vector<nb::embed::ArticleVector> vectors;
  nb::cluster::Cluster cluster;
  compose::ComposeConfig cfg;

  PostFixture() {
    const auto t = at("2020-10-01T08:00:00Z");
    articles = {make_article("a1", "s1", t, "First paragraph.\n\nSecond.", "Outlier title"),
                make_article("a2", "s2", t, "Rep paragraph one.\n\nRep two.", "Representative title"),
                make_article("a3", "s3", t, "Third.", "Third title")};
    articles[1].image_url = "http://e.test/lead.png";
    vectors = {vec("a1", {1, 0}), vec("a2", {0.8, 0.6}), vec("a3", {0.6, 0.8})};
    cluster.members = {"a1", "a2", "a3"};
    cfg.placeholder_image = nb::testing::asset_dir() / "placeholder.png";
  }
};

compose::ImageLoader loader_with(std::map<std::string, std::vector<std::uint8_t>> images) {
  return [images = std::move(images)](const std::string& url) -> std::optional<std::vector<std::uint8_t>> {
    if (url.starts_with("file://")) {
      try {
        const auto s = nb::fetch::read_file(url.substr(7));
        return std::vector<std::uint8_t>(s.begin(), s.end());
      } catch (const nb::Error&) {
        return std::nullopt;
      }
    }
    auto it = images.find(url);
    if (it == images.end()) return std::nullopt;
    return it->second;
  };
}

}  // namespace

TEST(BuildPost, RepresentativeProvidesTitleLinkAndImage) {
  PostFixture f;
  const auto now = at("2020-10-01T12:00:00Z");
  const auto post = compose::build_post(f.cluster, f.articles, f.vectors, kNational, f.cfg, now,
                                        loader_with({{"http://e.test/lead.png", gray_png(640, 480)}}));
  EXPECT_EQ(post.representative_article_id, "a2");
  EXPECT_EQ(post.title, "Representative title");
  EXPECT_EQ(post.description, "Rep paragraph one.");
  EXPECT_EQ(post.link, "http://example.test/a2");
  EXPECT_EQ(post.image.source_image_url, "http://e.test/lead.png");
  EXPECT_EQ(post.image.crop, (compose::CropRect{80, 0, 480}));
  EXPECT_TRUE(post.hashtags.empty());
  EXPECT_EQ(post.created_at, now);
  EXPECT_EQ(post.post_id.size(), 17u);

  const nlohmann::json j = post;
  EXPECT_EQ(j.get<compose::Post>(), post);
}

TEST(BuildPost, MissingImageFallsBackToPlaceholder) {
  PostFixture f;
  f.cfg.hashtags = {"zpravy"};
  const auto post = compose::build_post(f.cluster, f.articles, f.vectors, kNational, f.cfg,
                                        at("2020-10-01T12:00:00Z"), loader_with({}));
  EXPECT_EQ(post.image.source_image_url, compose::placeholder_url(f.cfg));
  EXPECT_EQ(post.image.crop.side, 1080);
  EXPECT_EQ(post.hashtags, (std::vector<std::string>{"zpravy"}));
}

TEST(BuildPost, UndecodableImageFallsBackToPlaceholder) {
  PostFixture f;
  const auto post = compose::build_post(f.cluster, f.articles, f.vectors, kNational, f.cfg,
                                        at("2020-10-01T12:00:00Z"),
                                        loader_with({{"http://e.test/lead.png", {'n', 'o', 'p', 'e'}}}));
  EXPECT_EQ(post.image.source_image_url, compose::placeholder_url(f.cfg));
}

TEST(BuildPost, PostIdIsStableForTheSameRepresentative) {
  PostFixture f;
  const auto loader = loader_with({});
  const auto a = compose::build_post(f.cluster, f.articles, f.vectors, kNational, f.cfg, at("2020-10-01T12:00:00Z"), loader);
  const auto b = compose::build_post(f.cluster, f.articles, f.vectors, kNational, f.cfg, at("2020-10-02T12:00:00Z"), loader);
  EXPECT_EQ(a.post_id, b.post_id);
}
