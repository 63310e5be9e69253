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

#ifndef NEWSBURST_INGEST_HPP
#define NEWSBURST_INGEST_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "newsburst/core.hpp"

namespace newsburst::ingest {

class MalformedFeed : public Error {
 public:
  using Error::Error;
};

class ExtractionFailed : public Error {
 public:
  using Error::Error;
};

/// Feed category string -> region. Keys are matched exactly.
using CategoryMap = std::map<std::string, Region>;

/// Per-source CSS selectors locating the article parts on a publisher page.
struct ExtractionRules {
  std::string perex;  // first match's text; empty selector = no perex
  std::string body;   // all matches, joined by blank lines
  std::string image;  // first match's src/content/href
};

struct FeedSource {
  std::string source_id;
  std::string name;
  std::string feed_url;
  CategoryMap category_map;
  ExtractionRules rules;
};

struct FeedEntry {
  std::string source_id;
  std::string guid;
  std::string link;
  std::string title;
  Timestamp published_at{};
  std::vector<std::string> categories;
};

/// Parses RSS 2.0, RSS 1.0 (RDF) or Atom. Entries come back in feed order;
/// entries with neither guid nor link, or with a missing/unparseable date,
/// are skipped and described in `warnings`. Throws MalformedFeed when the
/// bytes are not well-formed XML or not a recognised feed document.
std::vector<FeedEntry> poll_feed(const FeedSource& source, std::string_view raw_xml,
                                 std::vector<std::string>* warnings = nullptr);

/// Builds an Article from the fetched page of `entry`. published_at is
/// clamped to fetched_at for feeds that advertise future dates.
Article read_article(const FeedEntry& entry, std::string_view html, const ExtractionRules& rules,
                     Timestamp fetched_at);

enum class UpsertResult { Inserted, Updated };

/// Articles keyed by article_id. When opened on a directory every upsert is
/// written through as `<dir>/articles/<article_id>.json` (atomic replace).
/// Single-writer: callers serialize upserts.
class ArticleStore {
 public:
  ArticleStore() = default;
  static ArticleStore open(const std::filesystem::path& dir);

  UpsertResult upsert(Article article);
  const Article* find(std::string_view article_id) const;
  std::size_t size() const { return records_.size(); }
  const std::map<std::string, Article, std::less<>>& records() const { return records_; }
  const std::optional<std::filesystem::path>& directory() const { return dir_; }

 private:
  std::map<std::string, Article, std::less<>> records_;
  std::optional<std::filesystem::path> dir_;
};

UpsertResult upsert_article(ArticleStore& store, Article article);

/// Articles with now - duration < published_at <= now, ordered by
/// (published_at, article_id).
std::vector<Article> select_window(const ArticleStore& store, Timestamp now, std::chrono::seconds duration);

}  // namespace newsburst::ingest

namespace newsburst {
void to_json(nlohmann::json& j, const Article& a);
void from_json(const nlohmann::json& j, Article& a);
}  // namespace newsburst

#endif  // NEWSBURST_INGEST_HPP
