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

#include "newsburst/score.hpp"

#include <algorithm>
#include <set>

#include "newsburst/textpipe.hpp"

namespace newsburst::score {

ClusterScore score_cluster(std::span<const Article> members) {
  if (members.empty()) throw PreconditionError("cannot score an empty cluster");
  ClusterScore s;
  s.size = members.size();
  std::set<std::string_view> sources;
  Timestamp first = members.front().published_at;
  Timestamp last = first;
  std::size_t total_tokens = 0;
  for (const auto& a : members) {
    sources.insert(a.source_id);
    first = std::min(first, a.published_at);
    last = std::max(last, a.published_at);
    total_tokens += text::tokenize(a.body).size();
  }
  s.distinct_sources = sources.size();
  s.time_span = (last - first).count();
  s.avg_length = static_cast<double>(total_tokens) / static_cast<double>(members.size());
  return s;
}

std::strong_ordering compare_scores(const ClusterScore& a, const ClusterScore& b) {
  if (auto c = a.size <=> b.size; c != 0) return c;
  if (auto c = a.distinct_sources <=> b.distinct_sources; c != 0) return c;
  if (auto c = b.time_span <=> a.time_span; c != 0) return c;
  if (a.avg_length < b.avg_length) return std::strong_ordering::less;
  if (a.avg_length > b.avg_length) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

void PublishPolicy::validate() const {
  if (min_size < 1) throw ConfigError("policy.min_size must be >= 1");
  if (min_distinct_sources < 1) throw ConfigError("policy.min_distinct_sources must be >= 1");
  if (important_min_size < min_size || important_min_sources < min_distinct_sources) {
    throw ConfigError("important thresholds must be at least the publish thresholds");
  }
}

bool should_publish(const ClusterScore& s, const PublishPolicy& p) {
  return s.size >= p.min_size && s.distinct_sources >= p.min_distinct_sources;
}

std::optional<Region> article_region(const Article& article,
                                     const std::map<std::string, ingest::CategoryMap>& category_maps) {
  auto source = category_maps.find(article.source_id);
  if (source == category_maps.end()) return std::nullopt;
  for (const auto& cat : article.categories) {
    auto hit = source->second.find(cat);
    if (hit != source->second.end()) return hit->second;
  }
  return std::nullopt;
}

PostCategory classify(std::span<const Article> members, const ClusterScore& s, const PublishPolicy& p,
                      const Article& representative,
                      const std::map<std::string, ingest::CategoryMap>& category_maps) {
  std::size_t national = 0;
  std::size_t international = 0;
  for (const auto& a : members) {
    if (auto r = article_region(a, category_maps)) {
      (*r == Region::National ? national : international) += 1;
    }
  }
  PostCategory out;
  if (national > international) {
    out.region = Region::National;
  } else if (international > national) {
    out.region = Region::International;
  } else {
    out.region = article_region(representative, category_maps).value_or(Region::National);
  }
  out.important = s.size >= p.important_min_size && s.distinct_sources >= p.important_min_sources;
  return out;
}

}  // namespace newsburst::score
