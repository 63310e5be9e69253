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

#include "newsburst/pipeline.hpp"
#include "test_support.hpp"

namespace nb = newsburst;
namespace pl = newsburst::pipeline;
using nb::testing::at;

namespace {

const nb::Timestamp kNow = at("2020-10-01T12:00:00Z");

/// The bundled fixture config with every output redirected under `root`.
pl::PipelineConfig e2e_config(const std::filesystem::path& root) {
  auto cfg = pl::load_config(NEWSBURST_E2E_CONFIG);
  cfg.store = root / "store";
  for (auto& ch : cfg.channels) {
    if (!ch.dir.empty()) ch.dir = root / ch.dir.filename();
    if (!ch.outbox.empty()) ch.outbox = root / ch.outbox.filename();
  }
  return cfg;
}

std::string slurp(const std::filesystem::path& p) { return nb::fetch::read_file(p); }

const char* kMinimal = R"(
store: s
compose:
  font: f.ttf
sources:
  - id: a
    feed: http://a.test/rss
    extract: {body: p}
)";

}  // namespace

TEST(Config, DefaultsAndRelativePaths) {
  const auto cfg = pl::parse_config(kMinimal, "/etc/newsburst");
  EXPECT_EQ(cfg.store, "/etc/newsburst/s");
  EXPECT_EQ(cfg.font, "/etc/newsburst/f.ttf");
  EXPECT_DOUBLE_EQ(cfg.window_hours, 24.0);
  EXPECT_DOUBLE_EQ(cfg.tau, 0.92);
  EXPECT_EQ(cfg.n_tokens, 50u);
  EXPECT_EQ(cfg.embedding.kind, pl::EmbeddingSpec::Kind::Hash);
  EXPECT_EQ(cfg.embedding.dimension, 200u);
  EXPECT_EQ(cfg.policy.min_size, 3u);
  ASSERT_EQ(cfg.sources.size(), 1u);
  EXPECT_EQ(cfg.sources[0].name, "a");
  EXPECT_EQ(cfg.sources[0].rules.body, "p");
  EXPECT_TRUE(cfg.channels.empty());
}

TEST(Config, FixtureConfigLoads) {
  const auto cfg = pl::load_config(NEWSBURST_E2E_CONFIG);
  EXPECT_EQ(cfg.sources.size(), 3u);
  EXPECT_EQ(cfg.sources[1].category_map.at("Zprávy z domova"), nb::Region::National);
  EXPECT_EQ(cfg.compose.hashtags, (std::vector<std::string>{"zpravy", "rozpocet"}));
  ASSERT_EQ(cfg.channels.size(), 3u);
  EXPECT_EQ(cfg.channels[2].kind, nb::publish::ChannelKind::RssFeed);
  EXPECT_EQ(cfg.channels[2].feed.title, "newsburst demo");
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(pl::parse_config("store: [", "/"), nb::ConfigError);
  EXPECT_THROW(pl::parse_config(std::string(kMinimal) + "bogus_key: 1\n", "/"), nb::ConfigError);
  EXPECT_THROW(pl::parse_config(std::string(kMinimal) + "threshold: high\n", "/"), nb::ConfigError);
  EXPECT_THROW(pl::parse_config(std::string(kMinimal) + "channels: [{kind: fax}]\n", "/"), nb::ConfigError);
  EXPECT_THROW(pl::load_config("/nonexistent/newsburst.yaml"), nb::ConfigError);
}

TEST(Config, ValidateCatchesImpossibleSettings) {
  nb::testing::TempDir dir;
  auto cfg = e2e_config(dir.path());
  cfg.tau = 1.5;
  EXPECT_THROW(cfg.validate(), nb::ConfigError);
  cfg = e2e_config(dir.path());
  cfg.window_hours = 0;
  EXPECT_THROW(cfg.validate(), nb::ConfigError);
  cfg = e2e_config(dir.path());
  cfg.font = dir / "missing.ttf";
  EXPECT_THROW(cfg.validate(), nb::ConfigError);
  cfg = e2e_config(dir.path());
  cfg.sources.push_back(cfg.sources[0]);
  EXPECT_THROW(cfg.validate(), nb::ConfigError);
}

TEST(Config, TokenFromEnvironment) {
  ::setenv("NEWSBURST_TEST_TOKEN", "s3cret", 1);
  const auto cfg = pl::parse_config(std::string(kMinimal) +
                                        "channels: [{kind: webhook, endpoint: 'http://h.test/x', "
                                        "token_env: NEWSBURST_TEST_TOKEN}]\n",
                                    "/");
  EXPECT_EQ(cfg.channels[0].token, "s3cret");
}

TEST(Pipeline, EmptyStoreAndNoFeedsGivesZeros) {
  nb::testing::TempDir dir;
  auto cfg = e2e_config(dir.path());
  cfg.sources.clear();
  const auto report = pl::run_once(cfg, kNow);
  EXPECT_EQ(report.windowed, 0u);
  EXPECT_EQ(report.clusters, 0u);
  EXPECT_EQ(report.published, 0u);
  EXPECT_FALSE(report.partial_failure());
}

TEST(Pipeline, FixtureBurstPublishesOnce) {
  nb::testing::TempDir dir;
  const auto cfg = e2e_config(dir.path());
  const auto first = pl::run_once(cfg, kNow);
  EXPECT_EQ(first.fetched, 9u);
  EXPECT_EQ(first.vectorized, 9u);
  EXPECT_EQ(first.eligible, 1u);
  EXPECT_EQ(first.published, 1u);
  EXPECT_FALSE(first.partial_failure()) << pl::format_report(first);
  for (const auto& r : first.receipts) EXPECT_TRUE(r.ok()) << r.channel << ": " << r.detail;

  const auto second = pl::run_once(cfg, kNow);
  EXPECT_EQ(second.published, 0u);
  EXPECT_EQ(second.suppressed, 1u);
  EXPECT_EQ(second.stored, 0u);

  const auto feed = slurp(dir / "feed/feed.xml");
  EXPECT_EQ(std::count(feed.begin(), feed.end(), '\n') > 0, true);
  EXPECT_NE(feed.find("#zpravy #rozpocet"), std::string::npos);
}

TEST(Pipeline, RunsAreReproducible) {
  nb::testing::TempDir a;
  nb::testing::TempDir b;
  const auto ra = pl::run_once(e2e_config(a.path()), kNow);
  const auto rb = pl::run_once(e2e_config(b.path()), kNow);
  auto normalized = [](const pl::RunReport& r, const std::filesystem::path& root) {
    auto s = pl::report_json(r).dump();
    const auto p = root.string();
    for (auto at = s.find(p); at != std::string::npos; at = s.find(p)) s.replace(at, p.size(), "ROOT");
    return s;
  };
  EXPECT_EQ(normalized(ra, a.path()), normalized(rb, b.path()));
  ASSERT_EQ(ra.cluster_details.size(), rb.cluster_details.size());
  std::string id;
  for (const auto& c : ra.cluster_details)
    if (!c.post_id.empty()) id = c.post_id;
  ASSERT_FALSE(id.empty());
  EXPECT_EQ(slurp(a / ("posts/" + id + ".png")), slurp(b / ("posts/" + id + ".png")));
  EXPECT_EQ(slurp(a / ("posts/" + id + ".json")), slurp(b / ("posts/" + id + ".json")));
}

TEST(Pipeline, MissingSourceIsAPartialFailure) {
  nb::testing::TempDir dir;
  auto cfg = e2e_config(dir.path());
  cfg.sources[2].feed_url = "http://svet-c.example/gone.xml";
  const auto report = pl::run_once(cfg, kNow);
  EXPECT_TRUE(report.partial_failure());
  ASSERT_FALSE(report.errors.empty());
  EXPECT_EQ(report.errors[0].subject, "svet-c");
  EXPECT_EQ(report.fetched, 6u);
}

TEST(Pipeline, WindowAnalysisMatchesTheSimilarityExample) {
  nb::testing::TempDir dir;
  auto cfg = pl::load_config(NEWSBURST_INSPECT_CONFIG);
  cfg.store = dir / "store";
  auto store = nb::ingest::ArticleStore::open(cfg.store);
  auto fetcher = pl::make_fetcher(cfg);
  pl::RunReport report;
  pl::ingest_sources(cfg, store, *fetcher, kNow, report);
  ASSERT_EQ(store.size(), 3u);
  const auto w = pl::analyze_window(cfg, store, kNow, report);
  ASSERT_EQ(w.articles.size(), 3u);
  EXPECT_NEAR(w.matrix(0, 1), 0.6, 1e-12);
  EXPECT_NEAR(w.matrix(0, 2), 0.8, 1e-12);
  EXPECT_NEAR(w.matrix(1, 2), 0.96, 1e-12);
  EXPECT_EQ(w.cliques, (std::vector<nb::cluster::NodeSet>{{1, 2}, {0}}));
}

TEST(Pipeline, StoreLockIsExclusive) {
  nb::testing::TempDir dir;
  pl::StoreLock first(dir.path());
  EXPECT_THROW(pl::StoreLock second(dir.path()), nb::IoError);
}

TEST(Report, JsonOmitsTimingsByDefault) {
  pl::RunReport r;
  r.now = kNow;
  r.timings_ms["ingest"] = 1.5;
  EXPECT_FALSE(pl::report_json(r).contains("timings_ms"));
  EXPECT_TRUE(pl::report_json(r, true).contains("timings_ms"));
  EXPECT_EQ(pl::report_json(r)["now"], "2020-10-01T12:00:00Z");
}
