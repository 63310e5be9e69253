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

#ifndef NEWSBURST_SCORE_HPP
#define NEWSBURST_SCORE_HPP

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>

#include "newsburst/core.hpp"
#include "newsburst/ingest.hpp"

namespace newsburst::score {

/// Rating of a cluster. Compared lexicographically: size (more is better),
/// distinct_sources (more), time_span (shorter burst is better),
/// avg_length (longer). The last two only break ties.
struct ClusterScore {
  std::size_t size = 0;
  std::size_t distinct_sources = 0;
  std::int64_t time_span = 0;  // seconds between first and last publication
  double avg_length = 0.0;     // mean body length in tokens

  friend bool operator==(const ClusterScore&, const ClusterScore&) = default;
};

ClusterScore score_cluster(std::span<const Article> members);

/// `greater` when `a` ranks above `b`.
std::strong_ordering compare_scores(const ClusterScore& a, const ClusterScore& b);

struct PublishPolicy {
  std::size_t min_size = 3;
  std::size_t min_distinct_sources = 2;
  std::size_t important_min_size = 5;
  std::size_t important_min_sources = 3;

  /// Throws ConfigError unless the important thresholds dominate the base ones.
  void validate() const;
};

/// Only size and source diversity gate publication.
bool should_publish(const ClusterScore& s, const PublishPolicy& p);

struct PostCategory {
  Region region = Region::National;
  bool important = false;

  friend bool operator==(const PostCategory&, const PostCategory&) = default;
};

/// Region of one article: its first feed category present in its source's
/// category map, if any.
std::optional<Region> article_region(const Article& article,
                                     const std::map<std::string, ingest::CategoryMap>& category_maps);

/// Majority region over members with a mapped category; a tie (or no mapped
/// member) falls back to the representative's region, then National.
PostCategory classify(std::span<const Article> members, const ClusterScore& s, const PublishPolicy& p,
                      const Article& representative,
                      const std::map<std::string, ingest::CategoryMap>& category_maps);

}  // namespace newsburst::score

#endif  // NEWSBURST_SCORE_HPP
