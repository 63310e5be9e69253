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

#include "newsburst/fetch.hpp"

#include <atomic>
#include <fstream>
#include <iterator>

#include "httplib/httplib.h"

namespace newsburst::fetch {

UrlParts split_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) throw ConfigError("not an absolute URL: " + std::string(url));
  const std::string_view scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ConfigError("unsupported URL scheme: " + std::string(url));
  const auto host_start = scheme_end + 3;
  auto path_start = url.find_first_of("/?#", host_start);
  UrlParts parts;
  parts.host = std::string(url.substr(host_start, path_start == std::string_view::npos ? std::string_view::npos
                                                                                       : path_start - host_start));
  if (parts.host.empty()) throw ConfigError("URL without host: " + std::string(url));
  parts.origin = std::string(scheme) + "://" + parts.host;
  std::string path = path_start == std::string_view::npos ? std::string("/") : std::string(url.substr(path_start));
  if (auto hash = path.find('#'); hash != std::string::npos) path.resize(hash);
  if (path.empty() || path.front() != '/') path.insert(path.begin(), '/');
  parts.path = std::move(path);
  return parts;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  static std::atomic<unsigned> counter{0};
  auto tmp = path;
  tmp += ".tmp" + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot replace " + path.string());
  }
}

HttpFetcher::HttpFetcher(std::chrono::seconds timeout, std::string user_agent)
    : timeout_(timeout), user_agent_(std::move(user_agent)) {}

std::string HttpFetcher::get(const std::string& url) {
  const auto parts = split_url(url);
  httplib::Client client(parts.origin);
  client.set_follow_location(true);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  auto res = client.Get(parts.path, httplib::Headers{{"User-Agent", user_agent_}});
  if (!res) throw FetchError("GET " + url + " failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300) {
    throw FetchError("GET " + url + " returned HTTP " + std::to_string(res->status));
  }
  return std::move(res->body);
}

MirrorFetcher::MirrorFetcher(std::filesystem::path root) : root_(std::move(root)) {}

std::filesystem::path MirrorFetcher::path_for(std::string_view url) const {
  const auto parts = split_url(url);
  std::string path = parts.path.substr(0, parts.path.find('?'));
  if (path.ends_with('/')) path += "index.html";
  std::filesystem::path out = root_ / parts.host;
  for (const auto& segment : std::filesystem::path(path.substr(1))) {
    if (segment == "..") throw FetchError("refusing path traversal in " + std::string(url));
    out /= segment;
  }
  return out;
}

std::string MirrorFetcher::get(const std::string& url) {
  const auto path = path_for(url);
  try {
    return read_file(path);
  } catch (const IoError&) {
    throw FetchError("no mirrored copy of " + url + " at " + path.string());
  }
}

}  // namespace newsburst::fetch
