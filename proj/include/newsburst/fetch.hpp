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

#ifndef NEWSBURST_FETCH_HPP
#define NEWSBURST_FETCH_HPP

#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>

#include "newsburst/core.hpp"

namespace newsburst::fetch {

class FetchError : public IoError {
 public:
  using IoError::IoError;
};

struct UrlParts {
  std::string origin;  // scheme://host[:port]
  std::string host;    // host[:port]
  std::string path;    // starts with '/', includes the query
};

/// Throws ConfigError for anything that is not an absolute http(s) URL.
UrlParts split_url(std::string_view url);

/// Source of raw bytes for feeds, pages and images. Implementations must be
/// safe to call from several threads at once.
class Fetcher {
 public:
  virtual ~Fetcher() = default;
  virtual std::string get(const std::string& url) = 0;
};

/// Live HTTP(S) GET with redirects followed.
class HttpFetcher final : public Fetcher {
 public:
  explicit HttpFetcher(std::chrono::seconds timeout = std::chrono::seconds(15),
                       std::string user_agent = "newsburst/1.0");
  std::string get(const std::string& url) override;

 private:
  std::chrono::seconds timeout_;
  std::string user_agent_;
};

/// Offline fetcher over a mirrored site tree: http://host/a/b.html is read
/// from <root>/host/a/b.html; a trailing '/' maps to index.html and the
/// query string is ignored.
class MirrorFetcher final : public Fetcher {
 public:
  explicit MirrorFetcher(std::filesystem::path root);
  std::string get(const std::string& url) override;
  std::filesystem::path path_for(std::string_view url) const;

 private:
  std::filesystem::path root_;
};

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace newsburst::fetch

#endif  // NEWSBURST_FETCH_HPP
