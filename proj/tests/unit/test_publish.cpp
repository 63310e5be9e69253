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

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "newsburst/fetch.hpp"
#include "newsburst/publish.hpp"
#include "test_support.hpp"
#include "httplib/httplib.h"

namespace nb = newsburst;
namespace publish = newsburst::publish;
namespace compose = newsburst::compose;
using nb::testing::at;
using namespace std::chrono_literals;

namespace {

compose::Post make_post(std::string id, std::string title = "Vláda schválila rozpočet") {
  compose::Post p;
  p.post_id = std::move(id);
  p.representative_article_id = "rep";
  p.title = std::move(title);
  p.description = "První odstavec.";
  p.link = "http://e.test/clanek/1";
  p.image.crop = {0, 0, 10};
  p.image.title_text = p.title;
  p.created_at = at("2020-10-01T12:00:00Z");
  return p;
}

const std::vector<std::uint8_t> kPng{0x89, 'P', 'N', 'G', 1, 2, 3};

std::string slurp(const std::filesystem::path& p) { return nb::fetch::read_file(p); }

/// httplib server on a free port, torn down on destruction.
class MockServer {
 public:
  MockServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Server& server() { return server_; }
  std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port_) + path; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

// --- file sink -----------------------------------------------------------------

TEST(FileSink, WritesImageAndJsonThatRoundTrips) {
  nb::testing::TempDir dir;
  const auto post = make_post("p1");
  const auto r = publish::publish_file(post, kPng, dir / "out");
  ASSERT_TRUE(r.ok()) << r.detail;
  EXPECT_EQ(r.artifacts.size(), 2u);
  const auto png = slurp(dir / "out/p1.png");
  EXPECT_EQ(std::vector<std::uint8_t>(png.begin(), png.end()), kPng);
  EXPECT_EQ(nlohmann::json::parse(slurp(dir / "out/p1.json")).get<compose::Post>(), post);
}

TEST(FileSink, UnwritableDirectoryGivesFailedReceipt) {
  nb::testing::TempDir dir;
  std::ofstream(dir / "blocker") << "x";
  const auto r = publish::publish_file(make_post("p1"), kPng, dir / "blocker/sub");
  EXPECT_EQ(r.status, publish::DeliveryStatus::Failed);
  EXPECT_TRUE(r.detail.starts_with("IoError")) << r.detail;
}

TEST(FileSink, TwoPostsGiveFourFiles) {
  nb::testing::TempDir dir;
  publish::publish_file(make_post("p1"), kPng, dir.path());
  publish::publish_file(make_post("p2"), kPng, dir.path());
  EXPECT_EQ(std::distance(std::filesystem::directory_iterator(dir.path()), {}), 4);
}

// --- webhook -----------------------------------------------------------------------

TEST(Webhook, SuccessCarriesResponseId) {
  MockServer mock;
  std::string auth, caption, content_type, filename, image;
  mock.server().Post("/photos", [&](const httplib::Request& req, httplib::Response& res) {
    auth = req.get_header_value("Authorization");
    caption = req.get_file_value("caption").content;
    const auto file = req.get_file_value("image");
    content_type = file.content_type;
    filename = file.filename;
    image = file.content;
    res.set_content(R"({"id":"123_456"})", "application/json");
  });
  const auto r = publish::publish_webhook(make_post("p1"), kPng, mock.url("/photos"), "secret");
  ASSERT_TRUE(r.ok()) << r.detail;
  EXPECT_EQ(r.detail, "123_456");
  EXPECT_EQ(r.attempts, 1);
  EXPECT_EQ(auth, "Bearer secret");
  EXPECT_EQ(caption, "První odstavec.");
  EXPECT_EQ(content_type, "image/png");
  EXPECT_EQ(filename, "p1.png");
  EXPECT_EQ(image, std::string(kPng.begin(), kPng.end()));
}

TEST(Webhook, ServerErrorIsRetriedThreeTimes) {
  MockServer mock;
  std::atomic<int> calls{0};
  mock.server().Post("/photos", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 500;
  });
  const auto r = publish::publish_webhook(make_post("p1"), kPng, mock.url("/photos"), "secret", {3, 1ms});
  EXPECT_EQ(r.status, publish::DeliveryStatus::Failed);
  EXPECT_EQ(r.attempts, 3);
  EXPECT_EQ(calls.load(), 3);
}

TEST(Webhook, RecoversOnSecondAttempt) {
  MockServer mock;
  std::atomic<int> calls{0};
  mock.server().Post("/photos", [&](const httplib::Request&, httplib::Response& res) {
    if (++calls == 1) {
      res.status = 503;
    } else {
      res.set_content("abc\n", "text/plain");
    }
  });
  const auto r = publish::publish_webhook(make_post("p1"), kPng, mock.url("/photos"), "secret", {3, 1ms});
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.attempts, 2);
  EXPECT_EQ(r.detail, "abc");
}

TEST(Webhook, MissingTokenIsAConfigError) {
  EXPECT_THROW(publish::publish_webhook(make_post("p1"), kPng, "http://127.0.0.1:9/x", ""), nb::ConfigError);
}

TEST(Webhook, UnreachableEndpointFails) {
  const auto r = publish::publish_webhook(make_post("p1"), kPng, "http://127.0.0.1:9/x", "t", {2, 1ms});
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(r.attempts, 2);
}

// --- short text -------------------------------------------------------------------

TEST(ShortText, FitsUnchanged) {
  const std::string title(40, 't');
  const std::string link = "https://e.test/a/123456";
  ASSERT_EQ(link.size(), 23u);
  const auto s = publish::format_short_text(title, link, 280);
  EXPECT_EQ(s, title + " " + link);
  EXPECT_EQ(s.size(), 64u);
}

TEST(ShortText, LongTitleIsCutAtAWord) {
  std::string title;
  while (title.size() < 300) title += "slovo ";
  title.resize(300);
  const std::string link = "https://e.test/a/123456";
  const auto s = publish::format_short_text(title, link, 280);
  EXPECT_LE(nb::utf8_length(s), 280u);
  EXPECT_TRUE(s.ends_with("… " + link));
  const auto head = s.substr(0, s.size() - link.size() - 1 - std::string("…").size());
  EXPECT_LE(nb::utf8_length(head), 255u);
  EXPECT_TRUE(head.ends_with("slovo"));
  EXPECT_TRUE(title.starts_with(head));
}

TEST(ShortText, CountsCharactersNotBytes) {
  const std::string title = "Žluťoučký kůň úpěl ďábelské ódy";  // 31 characters, more bytes
  const auto s = publish::format_short_text(title, "http://e.test", 45);
  EXPECT_EQ(s, title + " http://e.test");
}

TEST(ShortText, LimitBelowLinkIsAPreconditionError) {
  EXPECT_THROW(publish::format_short_text("t", "http://e.test/long", 10), nb::PreconditionError);
}

// --- image host ---------------------------------------------------------------------

TEST(ImageHost, IdempotentAndContentAddressed) {
  nb::testing::TempDir dir;
  const publish::HostConfig cfg{dir / "images", "http://h.test/images/", std::nullopt};
  const auto a = publish::host_image(kPng, cfg);
  EXPECT_EQ(a, publish::host_image(kPng, cfg));
  EXPECT_EQ(a, "http://h.test/images/" + nb::sha256_hex(std::string(kPng.begin(), kPng.end())) + ".png");
  const std::vector<std::uint8_t> other{1, 2};
  EXPECT_NE(a, publish::host_image(other, cfg));
}

TEST(ImageHost, RetentionSweep) {
  nb::testing::TempDir dir;
  publish::HostConfig cfg{dir / "images", "http://h.test/", std::nullopt};
  publish::host_image(kPng, cfg);
  const auto now = std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
  EXPECT_EQ(publish::sweep_hosted_images(cfg, now + 1000h), 0u);
  cfg.retention = 24h;
  EXPECT_EQ(publish::sweep_hosted_images(cfg, now), 0u);
  EXPECT_EQ(publish::sweep_hosted_images(cfg, now + 25h), 1u);
}

TEST(StaticServer, ServesHostedImagesByteForByte) {
  nb::testing::TempDir dir;
  std::vector<std::uint8_t> bytes(5000);
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = static_cast<std::uint8_t>(i * 7);
  const publish::HostConfig cfg{dir / "images", "http://h.test/images/", std::nullopt};
  const auto url = publish::host_image(bytes, cfg);
  publish::StaticServer server(dir.path());
  const int port = server.start();
  httplib::Client client("127.0.0.1", port);
  const auto res = client.Get("/images/" + url.substr(url.rfind('/') + 1));
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->body, std::string(bytes.begin(), bytes.end()));
  EXPECT_EQ(client.Get("/images/missing.png")->status, 404);
  server.stop();
}

// --- RSS ------------------------------------------------------------------------------

namespace {

namespace pt = boost::property_tree;

publish::PostRecord record(int i, nb::Timestamp when, std::string title = "") {
  publish::PostRecord r;
  r.post_id = "p" + std::to_string(i);
  r.title = title.empty() ? "Titulek " + std::to_string(i) : std::move(title);
  r.link = "http://e.test/" + std::to_string(i);
  r.image_url = "http://h.test/images/" + std::to_string(i) + ".png";
  r.image_length = 100 + i;
  r.publish_date = when;
  return r;
}

pt::ptree parse_xml(const std::string& xml) {
  std::istringstream in(xml);
  pt::ptree tree;
  pt::read_xml(in, tree);
  return tree;
}

std::vector<pt::ptree> items(const pt::ptree& rss) {
  std::vector<pt::ptree> out;
  for (const auto& [name, child] : rss.get_child("rss.channel")) {
    if (name == "item") out.push_back(child);
  }
  return out;
}

}  // namespace

TEST(Rss, EmptyStoreIsAValidFeed) {
  const auto tree = parse_xml(publish::emit_rss({}, {}));
  EXPECT_EQ(tree.get<std::string>("rss.<xmlattr>.version"), "2.0");
  EXPECT_EQ(tree.get<std::string>("rss.channel.title"), "newsburst");
  EXPECT_TRUE(items(tree).empty());
}

TEST(Rss, NewestFirstWithEnclosures) {
  const auto t = at("2020-10-01T08:00:00Z");
  const std::vector<publish::PostRecord> recs{record(1, t), record(2, t + 1h), record(3, t + 2h)};
  const auto tree = parse_xml(publish::emit_rss(recs, {"Zprávy", "http://h.test/", "Popis", "cs"}));
  EXPECT_EQ(tree.get<std::string>("rss.channel.title"), "Zprávy");
  const auto list = items(tree);
  ASSERT_EQ(list.size(), 3u);
  EXPECT_EQ(list[0].get<std::string>("title"), "Titulek 3");
  EXPECT_EQ(list[2].get<std::string>("title"), "Titulek 1");
  EXPECT_EQ(list[0].get<std::string>("enclosure.<xmlattr>.url"), "http://h.test/images/3.png");
  EXPECT_EQ(list[0].get<std::string>("enclosure.<xmlattr>.type"), "image/png");
  EXPECT_EQ(list[0].get<std::string>("enclosure.<xmlattr>.length"), "103");
  EXPECT_EQ(list[0].get<std::string>("pubDate"), "Thu, 01 Oct 2020 10:00:00 +0000");
  EXPECT_EQ(list[0].get<std::string>("guid"), "p3");
  // Element order inside an item is fixed.
  std::vector<std::string> names;
  for (const auto& [name, child] : list[0]) names.push_back(name);
  EXPECT_EQ(names, (std::vector<std::string>{"title", "link", "enclosure", "pubDate", "guid"}));
}

TEST(Rss, EscapesMarkupInTitles) {
  const auto xml = publish::emit_rss(std::vector{record(1, at("2020-10-01T08:00:00Z"), "a < b & \"c\" > d")}, {});
  EXPECT_NE(xml.find("a &lt; b &amp;"), std::string::npos);
  EXPECT_EQ(items(parse_xml(xml))[0].get<std::string>("title"), "a < b & \"c\" > d");
}

TEST(Rss, XmlEscapeDropsControlsAndRepairsUtf8) {
  EXPECT_EQ(publish::xml_escape("a\x01" "b\tc"), "ab\tc");
  EXPECT_EQ(publish::xml_escape("x\xff" "y"), "x\xEF\xBF\xBDy");
  EXPECT_EQ(publish::xml_escape("'"), "&apos;");
}

TEST(Rss, RecordsPersist) {
  nb::testing::TempDir dir;
  const std::vector<publish::PostRecord> recs{record(1, at("2020-10-01T08:00:00Z")), record(2, at("2020-10-01T09:00:00Z"))};
  publish::save_records(dir / "records.jsonl", recs);
  EXPECT_EQ(publish::load_records(dir / "records.jsonl"), recs);
  EXPECT_TRUE(publish::load_records(dir / "none.jsonl").empty());
}

// --- ledger and channels ----------------------------------------------------------------

TEST(Ledger, ClaimIsExclusiveUntilReleased) {
  publish::DeliveryLedger ledger;
  {
    auto c = ledger.claim("p1", "file");
    ASSERT_TRUE(c);
    EXPECT_FALSE(ledger.claim("p1", "file"));
    EXPECT_TRUE(ledger.claim("p1", "rss"));
  }
  // Released without a delivered receipt: free again.
  auto c = ledger.claim("p1", "file");
  ASSERT_TRUE(c);
  c->commit({"file", "p1", publish::DeliveryStatus::Failed, 1, "boom", {}});
  EXPECT_FALSE(ledger.delivered("p1", "file"));
}

TEST(Ledger, ConcurrentClaimsSendOnce) {
  publish::DeliveryLedger ledger;
  std::atomic<int> sent{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 16; ++i) {
    threads.emplace_back([&] {
      if (auto c = ledger.claim("p1", "webhook")) {
        ++sent;
        c->commit({"webhook", "p1", publish::DeliveryStatus::Delivered, 1, "", {}});
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(sent.load(), 1);
  EXPECT_EQ(ledger.delivered_count(), 1u);
}

TEST(Ledger, PersistsAcrossReopen) {
  nb::testing::TempDir dir;
  {
    auto ledger = publish::DeliveryLedger::open(dir / "ledger.jsonl");
    ledger.claim("p1", "file")->commit({"file", "p1", publish::DeliveryStatus::Delivered, 1, "", {}});
  }
  {
    std::ofstream(dir / "ledger.jsonl", std::ios::app) << "{\"torn";
  }
  auto ledger = publish::DeliveryLedger::open(dir / "ledger.jsonl");
  EXPECT_TRUE(ledger.delivered("p1", "file"));
  EXPECT_FALSE(ledger.claim("p1", "file"));
}

TEST(Channels, ConfigValidation) {
  publish::ChannelConfig c;
  c.kind = publish::ChannelKind::Webhook;
  c.endpoint = "http://e.test/x";
  EXPECT_THROW(c.validate(), nb::ConfigError);
  c.token = "t";
  EXPECT_NO_THROW(c.validate());
  c.kind = publish::ChannelKind::ShortText;
  c.limit = 29;
  EXPECT_THROW(c.validate(), nb::ConfigError);
  c.kind = publish::ChannelKind::RssFeed;
  c.dir = "/tmp/x";
  c.base_url = "http://h.test";
  EXPECT_THROW(c.validate(), nb::ConfigError);
  EXPECT_EQ(publish::parse_channel_kind("short_text"), publish::ChannelKind::ShortText);
  EXPECT_FALSE(publish::parse_channel_kind("fax"));
}

TEST(Channels, DeliverAllIsIdempotentPerChannel) {
  nb::testing::TempDir dir;
  std::vector<std::unique_ptr<publish::Channel>> channels;
  publish::ChannelConfig file;
  file.kind = publish::ChannelKind::FileSink;
  file.name = "file";
  file.dir = dir / "posts";
  channels.push_back(publish::make_channel(file));
  publish::ChannelConfig shorty;
  shorty.kind = publish::ChannelKind::ShortText;
  shorty.name = "short";
  shorty.outbox = dir / "short.jsonl";
  channels.push_back(publish::make_channel(shorty));
  publish::ChannelConfig rss;
  rss.kind = publish::ChannelKind::RssFeed;
  rss.name = "rss";
  rss.dir = dir / "feed";
  rss.base_url = "http://h.test/";
  channels.push_back(publish::make_channel(rss));

  publish::DeliveryLedger ledger;
  const auto post = make_post("p1");
  const auto first = publish::deliver_all(post, kPng, channels, ledger);
  ASSERT_EQ(first.size(), 3u);
  for (const auto& r : first) EXPECT_TRUE(r.ok()) << r.channel << ": " << r.detail;
  EXPECT_EQ(first[1].channel, "short");

  const auto second = publish::deliver_all(post, kPng, channels, ledger);
  for (const auto& r : second) EXPECT_EQ(r.status, publish::DeliveryStatus::Suppressed);

  const auto outbox = nlohmann::json::parse(slurp(dir / "short.jsonl"));
  EXPECT_EQ(outbox["text"], "Vláda schválila rozpočet http://e.test/clanek/1");
  const auto feed = parse_xml(slurp(dir / "feed/feed.xml"));
  ASSERT_EQ(items(feed).size(), 1u);
  EXPECT_TRUE(items(feed)[0].get<std::string>("enclosure.<xmlattr>.url").starts_with("http://h.test/images/"));
}

TEST(ShortTextProperty, AlwaysWithinLimitAndEndsWithLink) {
  nb::testing::Gen gen(14);
  for (int i = 0; i < 3000; ++i) {
    const std::string link = "https://e.test/" + std::string(gen.index(60), 'x');
    const std::size_t limit = nb::utf8_length(link) + 2 + gen.index(300);
    const std::string title = gen.text(60, 12);
    const auto s = publish::format_short_text(title, link, limit);
    EXPECT_LE(nb::utf8_length(s), limit);
    EXPECT_TRUE(s.ends_with(link));
  }
}
