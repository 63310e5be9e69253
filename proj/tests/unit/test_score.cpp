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

#include "newsburst/score.hpp"
#include "test_support.hpp"

namespace nb = newsburst;
namespace score = newsburst::score;
using nb::testing::at;
using nb::testing::make_article;
using namespace std::chrono_literals;

namespace {

score::ClusterScore cs(std::size_t size, std::size_t sources, std::int64_t span = 0, double len = 0) {
  return {size, sources, span, len};
}

const std::map<std::string, nb::ingest::CategoryMap> kMaps{
    {"a", {{"Domácí", nb::Region::National}, {"Svět", nb::Region::International}}},
    {"b", {{"domov", nb::Region::National}, {"svet", nb::Region::International}}},
};

nb::Article tagged(std::string id, std::string source, std::vector<std::string> cats) {
  auto a = make_article(std::move(id), std::move(source), at("2020-10-01T00:00:00Z"));
  a.categories = std::move(cats);
  return a;
}

}  // namespace

TEST(ScoreCluster, SingleArticle) {
  const std::vector<nb::Article> m{make_article("x", "s", at("2020-10-01T00:00:00Z"), "jedna dva, tři!")};
  EXPECT_EQ(score::score_cluster(m), cs(1, 1, 0, 3.0));
}

TEST(ScoreCluster, ThreeSourcesOverTwentyMinutes) {
  const auto t = at("2020-10-01T00:00:00Z");
  const std::vector<nb::Article> m{make_article("x", "a", t + 600s, "jedna dva"),
                                   make_article("y", "b", t, "jedna"),
                                   make_article("z", "c", t + 1200s, "jedna dva tři čtyři pět šest")};
  EXPECT_EQ(score::score_cluster(m), cs(3, 3, 1200, 3.0));
}

TEST(ScoreCluster, OneSource) {
  const auto t = at("2020-10-01T00:00:00Z");
  const std::vector<nb::Article> m{make_article("x", "a", t), make_article("y", "a", t), make_article("z", "a", t)};
  EXPECT_EQ(score::score_cluster(m).distinct_sources, 1u);
  EXPECT_THROW(score::score_cluster(std::span<const nb::Article>{}), nb::PreconditionError);
}

TEST(CompareScores, Examples) {
  EXPECT_EQ(score::compare_scores(cs(3, 3), cs(3, 1)), std::strong_ordering::greater);
  EXPECT_EQ(score::compare_scores(cs(4, 1), cs(3, 3)), std::strong_ordering::greater);
  EXPECT_EQ(score::compare_scores(cs(3, 2, 60, 10), cs(3, 2, 60, 10)), std::strong_ordering::equal);
  EXPECT_EQ(score::compare_scores(cs(3, 2, 60), cs(3, 2, 600)), std::strong_ordering::greater);
  EXPECT_EQ(score::compare_scores(cs(3, 2, 60, 5), cs(3, 2, 60, 50)), std::strong_ordering::less);
}

TEST(ShouldPublish, Examples) {
  const score::PublishPolicy p;
  EXPECT_TRUE(score::should_publish(cs(3, 2), p));
  EXPECT_FALSE(score::should_publish(cs(5, 1), p));
  EXPECT_FALSE(score::should_publish(cs(1, 1), p));
}

TEST(Policy, ImportantThresholdsMustDominate) {
  score::PublishPolicy p;
  EXPECT_NO_THROW(p.validate());
  p.important_min_size = 2;
  EXPECT_THROW(p.validate(), nb::ConfigError);
}

TEST(Classify, UnanimousInternational) {
  const std::vector<nb::Article> m{tagged("1", "a", {"Svět"}), tagged("2", "b", {"svet"}), tagged("3", "a", {"Svět"})};
  const auto c = score::classify(m, cs(3, 2), {}, m[0], kMaps);
  EXPECT_EQ(c, (score::PostCategory{nb::Region::International, false}));
}

TEST(Classify, MajorityWins) {
  const std::vector<nb::Article> m{tagged("1", "a", {"Domácí"}), tagged("2", "b", {"domov"}),
                                   tagged("3", "b", {"svet"})};
  EXPECT_EQ(score::classify(m, cs(3, 2), {}, m[2], kMaps).region, nb::Region::National);
}

TEST(Classify, TieFallsBackToRepresentativeThenNational) {
  const std::vector<nb::Article> m{tagged("1", "a", {"Domácí"}), tagged("2", "b", {"svet"}),
                                   tagged("3", "c", {"whatever"})};
  EXPECT_EQ(score::classify(m, cs(3, 3), {}, m[1], kMaps).region, nb::Region::International);
  EXPECT_EQ(score::classify(m, cs(3, 3), {}, m[2], kMaps).region, nb::Region::National);
}

TEST(Classify, UnmappedMembersAbstain) {
  const std::vector<nb::Article> m{tagged("1", "a", {"Sport"}), tagged("2", "c", {"x"}), tagged("3", "b", {"svet"})};
  EXPECT_EQ(score::classify(m, cs(3, 3), {}, m[0], kMaps).region, nb::Region::International);
}

TEST(Classify, Important) {
  const std::vector<nb::Article> m{tagged("1", "a", {})};
  EXPECT_TRUE(score::classify(m, cs(6, 4), {}, m[0], kMaps).important);
  EXPECT_FALSE(score::classify(m, cs(6, 2), {}, m[0], kMaps).important);
  EXPECT_FALSE(score::classify(m, cs(4, 4), {}, m[0], kMaps).important);
}

TEST(ArticleRegion, FirstMappedCategory) {
  EXPECT_EQ(score::article_region(tagged("1", "a", {"Sport", "Svět", "Domácí"}), kMaps), nb::Region::International);
  EXPECT_FALSE(score::article_region(tagged("1", "zz", {"Svět"}), kMaps));
}

TEST(CompareScoresProperty, TotalOrder) {
  nb::testing::Gen gen(8);
  auto random_score = [&] {
    return cs(gen.index(4) + 1, gen.index(3) + 1, gen.range(0, 3) * 60, static_cast<double>(gen.index(3)));
  };
  std::vector<score::ClusterScore> pool;
  for (int i = 0; i < 60; ++i) pool.push_back(random_score());
  for (const auto& a : pool) {
    for (const auto& b : pool) {
      const auto ab = score::compare_scores(a, b);
      const auto ba = score::compare_scores(b, a);
      EXPECT_EQ(ab > 0, ba < 0);
      EXPECT_EQ(ab == 0, a == b);
      for (const auto& c : pool) {
        if (ab > 0 && score::compare_scores(b, c) > 0) {
          EXPECT_TRUE(score::compare_scores(a, c) > 0);
        }
      }
    }
  }
}

TEST(ShouldPublishProperty, MonotoneAndBlindToSecondaryMetrics) {
  nb::testing::Gen gen(9);
  for (int i = 0; i < 2000; ++i) {
    const score::PublishPolicy p{gen.index(5) + 1, gen.index(4) + 1, 6, 5};
    const auto s = cs(gen.index(8) + 1, gen.index(8) + 1, gen.range(0, 9999), gen.uniform(0, 500));
    if (score::should_publish(s, p)) {
      EXPECT_TRUE(score::should_publish(cs(s.size + gen.index(3), s.distinct_sources + gen.index(3)), p));
    }
    EXPECT_EQ(score::should_publish(s, p), score::should_publish(cs(s.size, s.distinct_sources, 0, s.avg_length * 2), p));
  }
}

TEST(ScoreProperty, DuplicatingBodiesKeepsTheGate) {
  nb::testing::Gen gen(10);
  const score::PublishPolicy p;
  for (int i = 0; i < 200; ++i) {
    std::vector<nb::Article> m;
    const auto n = gen.index(5) + 1;
    for (std::size_t k = 0; k < n; ++k) {
      m.push_back(make_article("a" + std::to_string(k), "s" + std::to_string(gen.index(3)),
                               at("2020-10-01T00:00:00Z") + std::chrono::seconds(gen.range(0, 3600)), gen.text(10)));
    }
    auto doubled = m;
    for (auto& a : doubled) a.body += " " + a.body;
    EXPECT_EQ(score::should_publish(score::score_cluster(m), p), score::should_publish(score::score_cluster(doubled), p));
  }
}
