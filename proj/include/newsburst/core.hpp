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

#ifndef NEWSBURST_CORE_HPP
#define NEWSBURST_CORE_HPP

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace newsburst {

/// UTC instant with one-second resolution. Every timestamp in the pipeline
/// is injected (feeds, `--now`); nothing reads the wall clock implicitly.
using Timestamp = std::chrono::sys_seconds;

/// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

enum class Region { National, International };

std::string_view to_string(Region region);
std::optional<Region> parse_region(std::string_view text);

/// One fetched news item.
struct Article {
  std::string article_id;
  std::string source_id;
  std::string url;
  std::string title;
  std::string perex;
  std::string body;
  std::optional<std::string> image_url;
  Timestamp published_at{};
  Timestamp fetched_at{};
  std::vector<std::string> categories;

  friend bool operator==(const Article&, const Article&) = default;
};

/// Deterministic id for an article: hex digest of (source_id, guid).
std::string make_article_id(std::string_view source_id, std::string_view guid);

/// Digest over the fields that constitute an article's content; used to tell
/// a re-seen unchanged entry from an updated one.
std::string content_hash(const Article& article);

// Hashing helpers backed by OpenSSL.
std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);

// Time formatting and parsing.
std::string format_iso8601(Timestamp t);
std::string format_rfc822(Timestamp t);
std::optional<Timestamp> parse_iso8601(std::string_view text);
std::optional<Timestamp> parse_rfc822(std::string_view text);
/// Accepts either of the two formats above.
std::optional<Timestamp> parse_timestamp(std::string_view text);

// UTF-8 helpers.
std::size_t utf8_length(std::string_view text);
/// Byte offset of the code point at index `chars`, or text.size().
std::size_t utf8_offset(std::string_view text, std::size_t chars);

std::string trim(std::string_view text);

}  // namespace newsburst

#endif  // NEWSBURST_CORE_HPP
