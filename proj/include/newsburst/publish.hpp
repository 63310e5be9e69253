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

#ifndef NEWSBURST_PUBLISH_HPP
#define NEWSBURST_PUBLISH_HPP

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "newsburst/compose.hpp"
#include "newsburst/core.hpp"

namespace newsburst::publish {

enum class DeliveryStatus { Delivered, Failed, Suppressed };
std::string_view to_string(DeliveryStatus s);

struct Receipt {
  std::string channel;
  std::string post_id;
  DeliveryStatus status = DeliveryStatus::Failed;
  int attempts = 0;
  std::string detail;                  // response id, or the error
  std::vector<std::string> artifacts;  // paths or URLs produced

  bool ok() const { return status == DeliveryStatus::Delivered; }
};

void to_json(nlohmann::json& j, const Receipt& r);
void from_json(const nlohmann::json& j, Receipt& r);

// --- payloads ---------------------------------------------------------------

/// Writes <post_id>.png and <post_id>.json into `dir`. I/O problems come back
/// as a failed receipt.
Receipt publish_file(const compose::Post& post, std::span<const std::uint8_t> png, const std::filesystem::path& dir);

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds base_delay{500};  // doubled after each failure
};

/// Multipart POST with an "image" (PNG) and a "caption" part and a bearer
/// token. Throws ConfigError when the token is empty; delivery failures are
/// retried per `retry` and then reported in the receipt.
Receipt publish_webhook(const compose::Post& post, std::span<const std::uint8_t> png, const std::string& endpoint,
                        const std::string& token, const RetryPolicy& retry = {});

inline constexpr std::size_t kMinShortTextLimit = 30;

/// "title link" within `limit` characters. The link is never cut; an
/// overlong title is cut at a word boundary and ends with "…".
std::string format_short_text(const compose::Post& post, std::size_t limit);
std::string format_short_text(std::string_view title, std::string_view link, std::size_t limit);

// --- image host and feed ------------------------------------------------------

struct HostConfig {
  std::filesystem::path dir;
  std::string base_url;                      // ends with '/'
  std::optional<std::chrono::hours> retention;
};

/// Stores `png` as <sha256>.png under cfg.dir; the URL is stable for equal bytes.
std::string host_image(std::span<const std::uint8_t> png, const HostConfig& cfg);

/// Removes hosted images last written before now - retention. Returns the
/// number removed; a no-op without a retention.
std::size_t sweep_hosted_images(const HostConfig& cfg, Timestamp now);

struct PostRecord {
  std::string image_url;
  Timestamp publish_date{};
  std::string title;
  std::string link;
  std::string post_id;
  std::uint64_t image_length = 0;

  friend bool operator==(const PostRecord&, const PostRecord&) = default;
};

void to_json(nlohmann::json& j, const PostRecord& r);
void from_json(const nlohmann::json& j, PostRecord& r);

struct FeedMeta {
  std::string title = "newsburst";
  std::string link = "http://localhost/";
  std::string description = "Bursting news";
  std::string language = "cs";
};

/// RSS 2.0, newest first (equal dates by post_id).
std::string emit_rss(std::span<const PostRecord> records, const FeedMeta& meta);

std::string xml_escape(std::string_view text);

/// Records persisted as JSON lines.
std::vector<PostRecord> load_records(const std::filesystem::path& path);
void save_records(const std::filesystem::path& path, std::span<const PostRecord> records);

/// Serves a directory over HTTP GET on a background thread.
class StaticServer {
 public:
  explicit StaticServer(std::filesystem::path root);
  ~StaticServer();
  StaticServer(const StaticServer&) = delete;
  StaticServer& operator=(const StaticServer&) = delete;

  /// Binds and starts serving; port 0 picks a free port. Returns the port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Blocks until stop() is called from elsewhere.
  void wait();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// --- delivery ledger ----------------------------------------------------------

/// Which (post_id, channel) pairs were delivered. Claims are exclusive, so a
/// pair is sent at most once across threads and, when file-backed, across runs.
class DeliveryLedger {
 public:
  class Claim {
   public:
    Claim(Claim&& other) noexcept;
    Claim& operator=(Claim&&) = delete;
    ~Claim();
    /// Records the receipt. Only delivered receipts block future claims.
    void commit(const Receipt& receipt);

   private:
    friend class DeliveryLedger;
    Claim(DeliveryLedger* ledger, std::string key) : ledger_(ledger), key_(std::move(key)) {}
    DeliveryLedger* ledger_;
    std::string key_;
  };

  DeliveryLedger();
  /// Loads and appends to a JSON-lines file.
  static DeliveryLedger open(const std::filesystem::path& file);
  DeliveryLedger(DeliveryLedger&&) noexcept;
  DeliveryLedger& operator=(DeliveryLedger&&) noexcept;
  ~DeliveryLedger();

  /// Empty when the pair is already delivered or claimed.
  std::optional<Claim> claim(std::string_view post_id, std::string_view channel);
  bool delivered(std::string_view post_id, std::string_view channel) const;
  std::size_t delivered_count() const;

 private:
  struct State;
  void release(const std::string& key);
  void record(const std::string& key, const Receipt& receipt);
  std::unique_ptr<State> state_;
};

// --- channels -----------------------------------------------------------------

enum class ChannelKind { FileSink, Webhook, ShortText, RssFeed };
std::string_view to_string(ChannelKind k);
std::optional<ChannelKind> parse_channel_kind(std::string_view text);

struct ChannelConfig {
  ChannelKind kind = ChannelKind::FileSink;
  std::string name;  // unique per pipeline; defaults to the kind
  std::filesystem::path dir;     // FileSink output, RssFeed output root
  std::string endpoint;          // Webhook, ShortText (optional there)
  std::string token;
  std::size_t limit = 280;       // ShortText
  std::filesystem::path outbox;  // ShortText without an endpoint: JSON lines
  std::string base_url;          // RssFeed: public URL of `dir`
  FeedMeta feed;
  std::optional<std::chrono::hours> retention;
  RetryPolicy retry;

  /// Throws ConfigError for settings that cannot work.
  void validate() const;
};

class Channel {
 public:
  virtual ~Channel() = default;
  virtual const std::string& name() const = 0;
  virtual Receipt deliver(const compose::Post& post, std::span<const std::uint8_t> png) = 0;
};

std::unique_ptr<Channel> make_channel(const ChannelConfig& cfg);

/// Sends the post on every channel in parallel, skipping pairs the ledger
/// already holds. Receipts come back in channel order.
std::vector<Receipt> deliver_all(const compose::Post& post, std::span<const std::uint8_t> png,
                                 std::span<const std::unique_ptr<Channel>> channels, DeliveryLedger& ledger);

}  // namespace newsburst::publish

#endif  // NEWSBURST_PUBLISH_HPP
