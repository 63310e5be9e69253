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

#include <cmath>
#include <fstream>

#include <gtest/gtest.h>

#include "newsburst/embed.hpp"
#include "test_support.hpp"

namespace nb = newsburst;
namespace embed = newsburst::embed;
using nb::testing::at;
using nb::testing::make_article;

namespace {

const nb::text::Lexicon kLex;
const nb::text::StopList kStops{"a", "se"};

nb::Article article(std::string body, std::string title = "") {
  return make_article("x", "s", at("2020-10-01T00:00:00Z"), std::move(body), std::move(title));
}

}  // namespace

TEST(TableProvider, ParsesHeaderAndRows) {
  const auto t = embed::TableProvider::parse("3 4\nkočka 1 0 0 0\npes 0 1 0 0\nrok 0.5 0.5 0.5 0.5\n");
  EXPECT_EQ(t->dimension(), 4u);
  EXPECT_EQ(t->size(), 3u);
  ASSERT_TRUE(t->lookup("pes"));
  EXPECT_EQ(*t->lookup("pes"), Eigen::Vector4d(0, 1, 0, 0));
  EXPECT_FALSE(t->lookup("myš"));
}

TEST(TableProvider, RejectsBadFiles) {
  EXPECT_THROW(embed::TableProvider::parse(""), embed::BadVectorFile);
  EXPECT_THROW(embed::TableProvider::parse("1 3\nab 1 2\n"), embed::BadVectorFile);
  EXPECT_THROW(embed::TableProvider::parse("1 2\nab 1 x\n"), embed::BadVectorFile);
  EXPECT_THROW(embed::TableProvider::parse("1 0\n"), embed::BadVectorFile);
  EXPECT_THROW(embed::TableProvider::parse("1 2\nab 1 nan\n"), embed::BadVectorFile);
}

TEST(TableProvider, LoadsFromDisk) {
  nb::testing::TempDir dir;
  std::ofstream(dir / "v.txt") << "2 2\na 1 0\nb 0 1\n";
  EXPECT_EQ(embed::load_table_provider(dir / "v.txt")->dimension(), 2u);
  EXPECT_THROW(embed::load_table_provider(dir / "missing.txt"), nb::Error);
}

TEST(HashProvider, DeterministicUnitVectors) {
  embed::HashProvider a(200, 1);
  embed::HashProvider b(200, 1);
  const auto va = a.lookup("rozpočet");
  ASSERT_TRUE(va);
  EXPECT_EQ(va->size(), 200);
  EXPECT_NEAR(va->norm(), 1.0, 1e-12);
  EXPECT_EQ(*va, *b.lookup("rozpočet"));
  EXPECT_NE(*va, *embed::HashProvider(200, 2).lookup("rozpočet"));
}

TEST(HashProvider, DistinctTokensAreNotParallel) {
  embed::HashProvider p(200, 1);
  const double cos = p.lookup("vláda")->dot(*p.lookup("vlády"));
  EXPECT_LT(cos, 0.5);
}

TEST(HashProvider, ZeroDimensionRejected) { EXPECT_THROW(embed::HashProvider(0, 1), nb::PreconditionError); }

TEST(Vectorize, IdenticalTokenVectorsGiveThatDirection) {
  const auto t = embed::TableProvider::parse("1 2\nslovo 3 4\n");
  std::string body;
  for (int i = 0; i < 60; ++i) body += "slovo ";
  const auto v = embed::vectorize_article(article(body), *t, {}, kLex, kStops);
  EXPECT_NEAR(v.v[0], 0.6, 1e-12);
  EXPECT_NEAR(v.v[1], 0.8, 1e-12);
  EXPECT_EQ(v.article_id, "x");
}

TEST(Vectorize, FewerThanLimitAveragesWhatIsThere) {
  const auto t = embed::TableProvider::parse("3 3\njedna 1 0 0\ndva 0 1 0\ntři 0 0 1\n");
  const auto v = embed::vectorize_article(article("jedna dva neznámé tři"), *t, {}, kLex, kStops);
  const double k = 1.0 / std::sqrt(3.0);
  EXPECT_NEAR(v.v[0], k, 1e-12);
  EXPECT_NEAR(v.v[1], k, 1e-12);
  EXPECT_NEAR(v.v[2], k, 1e-12);
}

TEST(Vectorize, OnlyStopWordsThrows) {
  embed::HashProvider p(8, 1);
  EXPECT_THROW(embed::vectorize_article(article("a se a"), p, {}, kLex, kStops), embed::NoEmbeddableTokens);
  const auto t = embed::TableProvider::parse("1 2\nslovo 1 0\n");
  EXPECT_THROW(embed::vectorize_article(article("jiné texty"), *t, {}, kLex, kStops), embed::NoEmbeddableTokens);
}

TEST(Vectorize, TitleTokensComeFirst) {
  const auto tokens = embed::leading_tokens(article("tělo textu", "Titulek zprávy"), {3}, kLex, kStops);
  EXPECT_EQ(tokens, (std::vector<std::string>{"titulek", "zprávy", "tělo"}));
}

TEST(VectorizeProperty, TextBeyondTheLimitIsIgnored) {
  nb::testing::Gen gen(21);
  embed::HashProvider p(64, 7);
  for (int i = 0; i < 100; ++i) {
    std::string body;
    for (int w = 0; w < 50; ++w) body += "w" + std::to_string(gen.index(30)) + " ";
    const auto base = embed::vectorize_article(article(body), p, {}, kLex, kStops);
    EXPECT_NEAR(base.v.norm(), 1.0, 1e-9);
    const auto longer = embed::vectorize_article(article(body + gen.text(30)), p, {}, kLex, kStops);
    EXPECT_EQ(base.v, longer.v);
  }
}
