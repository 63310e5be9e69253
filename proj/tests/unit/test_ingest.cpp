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

#include <algorithm>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "newsburst/fetch.hpp"
#include "newsburst/ingest.hpp"
#include "test_support.hpp"

namespace nb = newsburst;
namespace ingest = newsburst::ingest;
using nb::testing::at;
using nb::testing::make_article;
using namespace std::chrono_literals;

namespace {

ingest::FeedSource source(std::string id = "src") {
  ingest::FeedSource s;
  s.source_id = std::move(id);
  s.name = "Source";
  s.feed_url = "http://e.test/rss";
  s.rules.perex = "div.perex p";
  s.rules.body = "div.article-body > p";
  s.rules.image = R"(meta[property="og:image"])";
  return s;
}

std::string rss(const std::string& items) {
  return R"(<?xml version="1.0" encoding="UTF-8"?><rss version="2.0"><channel><title>T</title>)" + items +
         "</channel></rss>";
}

std::string mirror_file(const std::string& rel) {
  return nb::fetch::read_file(nb::testing::fixture_dir() / "e2e/mirror" / rel);
}

}  // namespace

// --- poll_feed -------------------------------------------------------------

TEST(PollFeed, EmptyChannelGivesNoEntries) { EXPECT_TRUE(ingest::poll_feed(source(), rss("")).empty()); }

TEST(PollFeed, TwoItemsInFeedOrder) {
  const auto entries = ingest::poll_feed(source(), rss(R"(
    <item><title>First</title><link>http://e.test/1</link><guid>g1</guid>
      <pubDate>Thu, 01 Oct 2020 10:00:00 GMT</pubDate><category>Domácí</category><category>Praha</category></item>
    <item><title>Second</title><link>http://e.test/2</link><guid>g2</guid>
      <pubDate>Thu, 01 Oct 2020 09:00:00 GMT</pubDate></item>)"));
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0].guid, "g1");
  EXPECT_EQ(entries[1].guid, "g2");
  EXPECT_EQ(entries[0].title, "First");
  EXPECT_EQ(entries[0].link, "http://e.test/1");
  EXPECT_EQ(entries[0].published_at, at("2020-10-01T10:00:00Z"));
  EXPECT_EQ(entries[0].categories, (std::vector<std::string>{"Domácí", "Praha"}));
  EXPECT_EQ(entries[0].source_id, "src");
}

TEST(PollFeed, ItemWithoutDateIsSkipped) {
  std::vector<std::string> warnings;
  const auto entries = ingest::poll_feed(source(), rss(R"(
    <item><title>A</title><link>http://e.test/1</link><guid>g1</guid></item>
    <item><title>B</title><link>http://e.test/2</link><guid>g2</guid><pubDate>Thu, 01 Oct 2020 09:00:00 GMT</pubDate></item>
    <item><title>C</title><link>http://e.test/3</link><guid>g3</guid><pubDate>not a date</pubDate></item>)"),
                                         &warnings);
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0].guid, "g2");
  EXPECT_EQ(warnings.size(), 2u);
}

TEST(PollFeed, GuidFallsBackToLinkAndEntriesWithNeitherAreSkipped) {
  std::vector<std::string> warnings;
  const auto entries = ingest::poll_feed(source(), rss(R"(
    <item><title>A</title><link>http://e.test/only-link</link><pubDate>Thu, 01 Oct 2020 09:00:00 GMT</pubDate></item>
    <item><title>B</title><pubDate>Thu, 01 Oct 2020 09:00:00 GMT</pubDate></item>)"),
                                         &warnings);
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0].guid, "http://e.test/only-link");
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(PollFeed, MalformedXmlThrows) {
  EXPECT_THROW(ingest::poll_feed(source(), "<rss><channel><item></channel>"), ingest::MalformedFeed);
  EXPECT_THROW(ingest::poll_feed(source(), ""), ingest::MalformedFeed);
  EXPECT_THROW(ingest::poll_feed(source(), "<html><body>not a feed</body></html>"), ingest::MalformedFeed);
}

TEST(PollFeed, AtomFeed) {
  const auto entries = ingest::poll_feed(source(), mirror_file("svet-c.example/atom.xml"));
  ASSERT_EQ(entries.size(), 3u);
  EXPECT_EQ(entries[0].guid, "tag:svet-c.example,2020:rozpocet");
  EXPECT_EQ(entries[0].link, "http://svet-c.example/domov/2020/10/01/rozpocet.html");
  EXPECT_EQ(entries[0].published_at, at("2020-10-01T08:02:00Z"));
  EXPECT_EQ(entries[0].categories, (std::vector<std::string>{"domov"}));
  EXPECT_EQ(entries[0].title, "Vláda schválila státní rozpočet se schodkem 320 miliard");
}

TEST(PollFeed, SingleByteEncodingIsTranscoded) {
  const auto raw = mirror_file("denik-b.example/export/rss");
  ASSERT_EQ(raw.find("Vláda"), std::string::npos);  // stored as windows-1250
  const auto entries = ingest::poll_feed(source(), raw);
  ASSERT_EQ(entries.size(), 3u);
  EXPECT_EQ(entries[0].title, "Vláda schválila rozpočet se schodkem 320 miliard korun");
  EXPECT_EQ(entries[0].categories, (std::vector<std::string>{"Zprávy z domova"}));
}

TEST(PollFeed, RdfFeed) {
  const auto entries = ingest::poll_feed(source(), R"(<?xml version="1.0"?>
    <rdf:RDF xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#" xmlns="http://purl.org/rss/1.0/"
             xmlns:dc="http://purl.org/dc/elements/1.1/">
      <channel><title>x</title></channel>
      <item rdf:about="http://e.test/1"><title>One</title><link>http://e.test/1</link>
        <dc:date>2020-10-01T10:00:00Z</dc:date></item>
    </rdf:RDF>)");
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0].guid, "http://e.test/1");
}

TEST(PollFeed, Deterministic) {
  const auto raw = mirror_file("www.zpravy-a.example/rss.xml");
  const auto a = ingest::poll_feed(source(), raw);
  const auto b = ingest::poll_feed(source(), raw);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].guid, b[i].guid);
    EXPECT_EQ(a[i].published_at, b[i].published_at);
  }
}

// --- read_article ------------------------------------------------------------

namespace {

ingest::FeedEntry entry_for(const std::string& link) {
  ingest::FeedEntry e;
  e.source_id = "zpravy-a";
  e.guid = "zpravy-a-1001";
  e.link = link;
  e.title = "Vláda schválila rozpočet se schodkem 320 miliard korun";
  e.published_at = at("2020-10-01T07:12:00Z");
  e.categories = {"Domácí"};
  return e;
}

}  // namespace

TEST(ReadArticle, LeadAndThreeBodyBlocks) {
  const auto html = mirror_file("www.zpravy-a.example/domaci/rozpocet-2021.html");
  const auto e = entry_for("http://www.zpravy-a.example/domaci/rozpocet-2021.html");
  const auto a = ingest::read_article(e, html, source().rules, at("2020-10-01T12:00:00Z"));
  EXPECT_EQ(a.article_id, nb::make_article_id("zpravy-a", "zpravy-a-1001"));
  EXPECT_EQ(a.perex, "Kabinet poslal do sněmovny návrh rozpočtu na příští rok.");
  // Three direct <p> children of the body container; the promo block is nested and excluded.
  const std::string expected =
      "Vláda na dnešním jednání schválila návrh státního rozpočtu na příští rok se schodkem 320 miliard korun. "
      "Výdaje státu mají dosáhnout 1920 miliard korun, příjmy 1600 miliard korun.\n\n"
      "Ministryně financí Alena Schillerová novinářům řekla, že rozpočet počítá s vyšší podporou zdravotnictví, "
      "dopravních staveb a penzí. Důchody se od ledna zvýší v průměru o 838 korun měsíčně.\n\n"
      "Opozice návrh kritizuje kvůli rekordnímu zadlužení a chybějícím úsporám ve státní správě. Poslanci budou "
      "rozpočet projednávat v prvním čtení koncem října.";
  EXPECT_EQ(a.body, expected);
  EXPECT_EQ(a.image_url, "http://www.zpravy-a.example/img/rozpocet.jpg");
  EXPECT_EQ(a.title, e.title);
  EXPECT_EQ(a.categories, e.categories);
  EXPECT_EQ(a.published_at, e.published_at);
  EXPECT_EQ(a.fetched_at, at("2020-10-01T12:00:00Z"));
}

TEST(ReadArticle, NoImageMatchLeavesImageAbsent) {
  const auto html = mirror_file("www.zpravy-a.example/pocasi/vikend.html");
  const auto a = ingest::read_article(entry_for("http://www.zpravy-a.example/pocasi/vikend.html"), html,
                                      source().rules, at("2020-10-01T12:00:00Z"));
  EXPECT_FALSE(a.image_url.has_value());
}

TEST(ReadArticle, BodySelectorWithoutTextFails) {
  auto rules = source().rules;
  rules.body = "div.nothing-here p";
  EXPECT_THROW(ingest::read_article(entry_for("http://e.test/x"), "<div><p>text</p></div>", rules,
                                    at("2020-10-01T12:00:00Z")),
               ingest::ExtractionFailed);
  rules.body = "p";
  EXPECT_THROW(ingest::read_article(entry_for("http://e.test/x"), "<div><p>   </p></div>", rules,
                                    at("2020-10-01T12:00:00Z")),
               ingest::ExtractionFailed);
}

TEST(ReadArticle, PublishedAtNeverAfterFetchedAt) {
  auto e = entry_for("http://e.test/x");
  e.published_at = at("2020-10-02T00:00:00Z");
  auto rules = source().rules;
  rules.body = "p";
  const auto a = ingest::read_article(e, "<p>body</p>", rules, at("2020-10-01T12:00:00Z"));
  EXPECT_EQ(a.published_at, at("2020-10-01T12:00:00Z"));
}

TEST(ReadArticle, TitleFallsBackToPageHeading) {
  auto e = entry_for("http://e.test/x");
  e.title.clear();
  auto rules = source().rules;
  rules.body = "p";
  const auto a = ingest::read_article(e, "<h1>Heading</h1><p>body</p>", rules, at("2020-10-01T12:00:00Z"));
  EXPECT_EQ(a.title, "Heading");
}

// --- store -------------------------------------------------------------------

TEST(Upsert, InsertIntoEmptyStore) {
  ingest::ArticleStore store;
  EXPECT_EQ(ingest::upsert_article(store, make_article("a", "s", at("2020-10-01T00:00:00Z"))),
            ingest::UpsertResult::Inserted);
  EXPECT_EQ(store.size(), 1u);
}

TEST(Upsert, ChangedBodyReplacesRecord) {
  ingest::ArticleStore store;
  auto a = make_article("a", "s", at("2020-10-01T00:00:00Z"), "old");
  ingest::upsert_article(store, a);
  a.body = "new";
  EXPECT_EQ(ingest::upsert_article(store, a), ingest::UpsertResult::Updated);
  EXPECT_EQ(store.size(), 1u);
  EXPECT_EQ(store.find("a")->body, "new");
}

TEST(Upsert, SameGuidDifferentSourcesAreTwoRecords) {
  ingest::ArticleStore store;
  auto a = make_article(nb::make_article_id("denik-b", "g1"), "denik-b", at("2020-10-01T00:00:00Z"));
  auto b = make_article(nb::make_article_id("svet-c", "g1"), "svet-c", at("2020-10-01T00:00:00Z"));
  ingest::upsert_article(store, a);
  ingest::upsert_article(store, b);
  EXPECT_EQ(store.size(), 2u);
  EXPECT_NE(store.find("bf2d2c505579301cbcee"), nullptr);
  EXPECT_NE(store.find("6fb1929ed52745395c8d"), nullptr);
}

TEST(Upsert, RepeatedUpsertIsIdempotent) {
  ingest::ArticleStore store;
  const auto a = make_article("a", "s", at("2020-10-01T00:00:00Z"));
  ingest::upsert_article(store, a);
  const auto before = store.records();
  ingest::upsert_article(store, a);
  EXPECT_EQ(store.records(), before);
}

TEST(Store, PersistsAndReloadsAllFields) {
  nb::testing::TempDir dir;
  auto a = make_article("abc", "s", at("2020-10-01T01:02:03Z"), "Body\n\nMore", "Titulek č");
  a.perex = "Perex";
  a.image_url = "http://e.test/i.jpg";
  a.categories = {"Domácí", "Praha"};
  a.fetched_at = at("2020-10-01T05:00:00Z");
  auto b = make_article("def", "t", at("2020-10-01T02:00:00Z"));
  {
    auto store = ingest::ArticleStore::open(dir.path());
    store.upsert(a);
    store.upsert(b);
  }
  const auto reopened = ingest::ArticleStore::open(dir.path());
  ASSERT_EQ(reopened.size(), 2u);
  EXPECT_EQ(*reopened.find("abc"), a);
  EXPECT_EQ(*reopened.find("def"), b);
  EXPECT_FALSE(reopened.find("def")->image_url.has_value());
}

TEST(Store, ArticleJsonRoundTrip) {
  auto a = make_article("abc", "s", at("2020-10-01T01:02:03Z"));
  a.image_url = "http://e.test/i.jpg";
  const nlohmann::json j = a;
  EXPECT_EQ(j.get<nb::Article>(), a);
}

// --- select_window -------------------------------------------------------------

TEST(SelectWindow, KeepsOnlyRecentArticles) {
  const auto now = at("2020-10-01T12:00:00Z");
  ingest::ArticleStore store;
  store.upsert(make_article("recent", "s", now - 23h));
  store.upsert(make_article("old", "s", now - 25h));
  const auto w = ingest::select_window(store, now, 24h);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w[0].article_id, "recent");
}

TEST(SelectWindow, EmptyStore) {
  EXPECT_TRUE(ingest::select_window(ingest::ArticleStore{}, at("2020-10-01T12:00:00Z"), 24h).empty());
}

TEST(SelectWindow, LowerBoundIsExclusiveUpperInclusive) {
  const auto now = at("2020-10-01T12:00:00Z");
  ingest::ArticleStore store;
  store.upsert(make_article("edge", "s", now - 24h));
  store.upsert(make_article("inside", "s", now - 24h + 1s));
  store.upsert(make_article("now", "s", now));
  store.upsert(make_article("future", "s", now + 1s));
  const auto w = ingest::select_window(store, now, 24h);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_EQ(w[0].article_id, "inside");
  EXPECT_EQ(w[1].article_id, "now");
}

TEST(SelectWindow, RejectsNonPositiveDuration) {
  EXPECT_THROW(ingest::select_window(ingest::ArticleStore{}, at("2020-10-01T12:00:00Z"), 0s),
               nb::PreconditionError);
}

TEST(SelectWindowProperty, SubsetSortedAndInsertionOrderInvariant) {
  nb::testing::Gen gen(11);
  const auto now = at("2020-10-01T12:00:00Z");
  for (int round = 0; round < 200; ++round) {
    std::vector<nb::Article> arts;
    const auto n = gen.index(30);
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse times so equal published_at values are common.
      arts.push_back(make_article("id" + std::to_string(gen.index(40)), "s", now - std::chrono::hours(gen.range(-2, 30))));
    }
    ingest::ArticleStore forward;
    for (const auto& a : arts) forward.upsert(a);
    // Same final records inserted in another order.
    ingest::ArticleStore shuffled;
    std::vector<nb::Article> finals;
    for (const auto& [id, a] : forward.records()) finals.push_back(a);
    std::shuffle(finals.begin(), finals.end(), gen.engine());
    for (const auto& a : finals) shuffled.upsert(a);

    const auto w1 = ingest::select_window(forward, now, 24h);
    const auto w2 = ingest::select_window(shuffled, now, 24h);
    EXPECT_EQ(w1, w2);
    for (std::size_t i = 0; i < w1.size(); ++i) {
      EXPECT_NE(forward.find(w1[i].article_id), nullptr);
      EXPECT_GT(w1[i].published_at, now - 24h);
      EXPECT_LE(w1[i].published_at, now);
      if (i) {
        EXPECT_LT(std::tie(w1[i - 1].published_at, w1[i - 1].article_id),
                  std::tie(w1[i].published_at, w1[i].article_id));
      }
    }
  }
}

// --- fetchers -----------------------------------------------------------------

TEST(MirrorFetcher, MapsUrlsIntoTheMirror) {
  nb::fetch::MirrorFetcher m(nb::testing::fixture_dir() / "e2e/mirror");
  EXPECT_EQ(m.path_for("http://svet-c.example/atom.xml"), nb::testing::fixture_dir() / "e2e/mirror/svet-c.example/atom.xml");
  EXPECT_EQ(m.path_for("http://e.test/dir/"), nb::testing::fixture_dir() / "e2e/mirror/e.test/dir/index.html");
  EXPECT_NE(m.get("http://svet-c.example/atom.xml").find("<feed"), std::string::npos);
  EXPECT_THROW(m.get("http://svet-c.example/missing.xml"), nb::fetch::FetchError);
  EXPECT_THROW(m.path_for("http://e.test/../../etc/passwd"), nb::Error);
}

TEST(SplitUrl, Parts) {
  const auto p = nb::fetch::split_url("https://e.test:8443/a/b?q=1");
  EXPECT_EQ(p.origin, "https://e.test:8443");
  EXPECT_EQ(p.host, "e.test:8443");
  EXPECT_EQ(p.path, "/a/b?q=1");
  EXPECT_EQ(nb::fetch::split_url("http://e.test").path, "/");
  EXPECT_THROW(nb::fetch::split_url("ftp://e.test/x"), nb::ConfigError);
}
