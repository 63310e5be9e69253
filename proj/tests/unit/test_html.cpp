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

#include "newsburst/html.hpp"
#include "test_support.hpp"

namespace html = newsburst::html;

namespace {

std::vector<std::string> texts(const html::Document& d, std::string_view selector) {
  std::vector<std::string> out;
  for (auto id : d.select(selector)) out.push_back(d.text_content(id));
  return out;
}

}  // namespace

TEST(Html, SelectsByTypeClassAndId) {
  auto d = html::Document::parse(R"(<div id="main" class="a b"><p class="x">one</p><p>two</p></div><p>three</p>)");
  EXPECT_EQ(texts(d, "p"), (std::vector<std::string>{"one", "two", "three"}));
  EXPECT_EQ(texts(d, "p.x"), (std::vector<std::string>{"one"}));
  EXPECT_EQ(texts(d, "#main p"), (std::vector<std::string>{"one", "two"}));
  EXPECT_EQ(texts(d, "div.a.b > p"), (std::vector<std::string>{"one", "two"}));
  EXPECT_EQ(texts(d, ".missing"), std::vector<std::string>{});
}

TEST(Html, ChildVersusDescendant) {
  auto d = html::Document::parse("<div><section><p>deep</p></section><p>direct</p></div>");
  EXPECT_EQ(texts(d, "div > p"), (std::vector<std::string>{"direct"}));
  EXPECT_EQ(texts(d, "div p"), (std::vector<std::string>{"deep", "direct"}));
}

TEST(Html, AttributeSelectors) {
  auto d = html::Document::parse(
      R"(<meta property="og:image" content="/a.jpg"><meta name="x" content="y">)"
      R"(<a href="https://e.test/doc.pdf" rel="nofollow noopener">f</a>)");
  auto og = d.select(R"(meta[property="og:image"])");
  ASSERT_EQ(og.size(), 1u);
  EXPECT_EQ(d.node(og[0]).attribute("content"), "/a.jpg");
  EXPECT_EQ(d.select("meta[content]").size(), 2u);
  EXPECT_EQ(d.select(R"(a[href^="https"])").size(), 1u);
  EXPECT_EQ(d.select(R"(a[href$=".pdf"])").size(), 1u);
  EXPECT_EQ(d.select(R"(a[href*="e.test"])").size(), 1u);
  EXPECT_EQ(d.select(R"(a[rel~="noopener"])").size(), 1u);
  EXPECT_EQ(d.select(R"(a[rel~="noop"])").size(), 0u);
}

TEST(Html, SelectorListKeepsDocumentOrderWithoutDuplicates) {
  auto d = html::Document::parse(R"(<h1 class="t">A</h1><h2 class="t">B</h2>)");
  EXPECT_EQ(texts(d, "h2, h1, .t"), (std::vector<std::string>{"A", "B"}));
}

TEST(Html, BadSelectorThrows) {
  auto d = html::Document::parse("<p>x</p>");
  EXPECT_THROW(d.select("p[unterminated"), html::SelectorError);
  EXPECT_THROW(d.select(""), html::SelectorError);
}

TEST(Html, TagSoupImpliedCloses) {
  auto d = html::Document::parse("<ul><li>one<li>two</ul><p>a<p>b<div>c</div>");
  EXPECT_EQ(texts(d, "li"), (std::vector<std::string>{"one", "two"}));
  EXPECT_EQ(texts(d, "p"), (std::vector<std::string>{"a", "b"}));
}

TEST(Html, TextContentSkipsScriptsAndCollapsesWhitespace) {
  auto d = html::Document::parse(
      "<div id=x>  Hello\n\t <b>big</b>&nbsp;world<script>var s = '<p>no</p>';</script><style>p{}</style>"
      "<p>next</p></div>");
  EXPECT_EQ(texts(d, "#x"), (std::vector<std::string>{"Hello big world next"}));
  EXPECT_EQ(d.select("p").size(), 1u);
}

TEST(Html, EntitiesAndComments) {
  auto d = html::Document::parse("<!DOCTYPE html><!-- <p>hidden</p> --><p>a &amp; b &lt;c&gt; &#269;&#x159; &eacute;</p>");
  EXPECT_EQ(texts(d, "p"), (std::vector<std::string>{"a & b <c> čř é"}));
  EXPECT_EQ(html::decode_entities("&unknown; &amp"), "&unknown; &amp");
}

TEST(Html, ResolveUrl) {
  EXPECT_EQ(html::resolve_url("http://e.test/a/b.html", "/img/x.jpg"), "http://e.test/img/x.jpg");
  EXPECT_EQ(html::resolve_url("http://e.test/a/b.html", "c.jpg"), "http://e.test/a/c.jpg");
  EXPECT_EQ(html::resolve_url("http://e.test/a/b.html", "https://cdn.test/z.png"), "https://cdn.test/z.png");
  EXPECT_EQ(html::resolve_url("https://e.test/a/b.html", "//cdn.test/z.png"), "https://cdn.test/z.png");
  EXPECT_EQ(html::resolve_url("http://e.test/a/b/c.html", "../d.jpg"), "http://e.test/a/d.jpg");
}

TEST(Html, RawTextElementsDoNotNest) {
  auto d = html::Document::parse("<title>A <b>not bold</b></title><p>x</p>");
  EXPECT_EQ(d.select("b").size(), 0u);
  EXPECT_EQ(texts(d, "title"), (std::vector<std::string>{"A <b>not bold</b>"}));
}

TEST(HtmlProperty, ParsingArbitraryBytesNeverThrows) {
  newsburst::testing::Gen gen(7);
  const std::string alphabet = "<>/=\"' abcdpiv!-&;#x\n";
  for (int i = 0; i < 500; ++i) {
    std::string s;
    const auto len = gen.index(200);
    for (std::size_t k = 0; k < len; ++k) s.push_back(alphabet[gen.index(alphabet.size())]);
    auto d = html::Document::parse(s);
    for (auto id : d.select("p, div a, [x]")) (void)d.text_content(id);
  }
}
