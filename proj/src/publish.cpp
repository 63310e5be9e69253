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

#include "newsburst/publish.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <future>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "httplib/httplib.h"
#include "newsburst/fetch.hpp"

namespace newsburst::publish {

std::string_view to_string(DeliveryStatus s) {
  switch (s) {
    case DeliveryStatus::Delivered: return "delivered";
    case DeliveryStatus::Failed: return "failed";
    case DeliveryStatus::Suppressed: return "suppressed";
  }
  return "failed";
}

void to_json(nlohmann::json& j, const Receipt& r) {
  j = nlohmann::json{{"channel", r.channel},   {"post_id", r.post_id}, {"status", to_string(r.status)},
                     {"attempts", r.attempts}, {"detail", r.detail},   {"artifacts", r.artifacts}};
}

void from_json(const nlohmann::json& j, Receipt& r) {
  j.at("channel").get_to(r.channel);
  j.at("post_id").get_to(r.post_id);
  const auto status = j.at("status").get<std::string>();
  r.status = status == "delivered"    ? DeliveryStatus::Delivered
             : status == "suppressed" ? DeliveryStatus::Suppressed
                                      : DeliveryStatus::Failed;
  r.attempts = j.value("attempts", 0);
  r.detail = j.value("detail", "");
  r.artifacts = j.value("artifacts", std::vector<std::string>{});
}

namespace {

std::string_view as_chars(std::span<const std::uint8_t> bytes) {
  return {reinterpret_cast<const char*>(bytes.data()), bytes.size()};
}

Receipt failed(std::string channel, std::string post_id, int attempts, std::string detail) {
  Receipt r;
  r.channel = std::move(channel);
  r.post_id = std::move(post_id);
  r.status = DeliveryStatus::Failed;
  r.attempts = attempts;
  r.detail = std::move(detail);
  return r;
}

std::string response_id(const std::string& body) {
  try {
    const auto j = nlohmann::json::parse(body);
    if (j.is_object() && j.contains("id")) {
      const auto& id = j.at("id");
      return id.is_string() ? id.get<std::string>() : id.dump();
    }
  } catch (const nlohmann::json::exception&) {
  }
  std::string t = trim(body);
  if (t.size() > 200) t.resize(200);
  return t;
}

struct Attempt {
  bool ok = false;
  std::string detail;
};

// Runs `send` up to retry.attempts times with exponential backoff.
template <typename Send>
Receipt with_retries(const std::string& channel, const std::string& post_id, const RetryPolicy& retry, Send send) {
  const int attempts = std::max(1, retry.attempts);
  auto delay = retry.base_delay;
  std::string last_error;
  for (int i = 1; i <= attempts; ++i) {
    Attempt a = send();
    if (a.ok) {
      Receipt r;
      r.channel = channel;
      r.post_id = post_id;
      r.status = DeliveryStatus::Delivered;
      r.attempts = i;
      r.detail = std::move(a.detail);
      return r;
    }
    last_error = std::move(a.detail);
    if (i < attempts) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
  }
  return failed(channel, post_id, attempts, last_error);
}

Attempt interpret(const httplib::Result& res) {
  if (!res) return {false, "transport error: " + httplib::to_string(res.error())};
  if (res->status < 200 || res->status > 299) return {false, "HTTP " + std::to_string(res->status)};
  return {true, response_id(res->body)};
}

httplib::Headers auth_headers(const std::string& token) {
  httplib::Headers h{{"User-Agent", "newsburst/1.0"}};
  if (!token.empty()) h.emplace("Authorization", "Bearer " + token);
  return h;
}

std::unique_ptr<httplib::Client> client_for(const fetch::UrlParts& parts) {
  auto client = std::make_unique<httplib::Client>(parts.origin);
  client->set_connection_timeout(std::chrono::seconds(10));
  client->set_read_timeout(std::chrono::seconds(30));
  client->set_write_timeout(std::chrono::seconds(30));
  return client;
}

}  // namespace

Receipt publish_file(const compose::Post& post, std::span<const std::uint8_t> png, const std::filesystem::path& dir) {
  const std::string channel = "file";
  try {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    const auto png_path = dir / (post.post_id + ".png");
    const auto json_path = dir / (post.post_id + ".json");
    fetch::write_file_atomic(png_path, as_chars(png));
    const nlohmann::json j = post;
    fetch::write_file_atomic(json_path, j.dump(2) + "\n");
    Receipt r;
    r.channel = channel;
    r.post_id = post.post_id;
    r.status = DeliveryStatus::Delivered;
    r.attempts = 1;
    r.detail = post.post_id;
    r.artifacts = {png_path.string(), json_path.string()};
    return r;
  } catch (const std::exception& e) {
    return failed(channel, post.post_id, 1, std::string("IoError: ") + e.what());
  }
}

Receipt publish_webhook(const compose::Post& post, std::span<const std::uint8_t> png, const std::string& endpoint,
                        const std::string& token, const RetryPolicy& retry) {
  if (token.empty()) throw ConfigError("webhook channel needs an access token");
  const auto parts = fetch::split_url(endpoint);
  const httplib::MultipartFormDataItems items = {
      {"image", std::string(as_chars(png)), post.post_id + ".png", "image/png"},
      {"caption", post.description, "", "text/plain; charset=utf-8"},
  };
  const auto headers = auth_headers(token);
  return with_retries("webhook", post.post_id, retry, [&] {
    auto client = client_for(parts);
    return interpret(client->Post(parts.path, headers, items));
  });
}

std::string format_short_text(std::string_view title, std::string_view link, std::size_t limit) {
  const std::size_t link_len = utf8_length(link);
  if (limit < link_len + 2) {
    throw PreconditionError("short-text limit " + std::to_string(limit) + " cannot fit a " +
                            std::to_string(link_len) + "-character link");
  }
  const std::string t = trim(title);
  if (t.empty()) return std::string(link);
  if (utf8_length(t) + 1 + link_len <= limit) return t + " " + std::string(link);

  // Room for the title including the ellipsis.
  const std::size_t budget = limit - link_len - 1;
  const std::size_t keep = budget - 1;
  std::size_t cut = utf8_offset(t, keep);
  if (cut < t.size() && t[cut] != ' ') {
    const std::size_t space = t.rfind(' ', cut);
    if (space != std::string::npos && space > 0) cut = space;
  }
  std::string head = t.substr(0, cut);
  while (!head.empty() && std::isspace(static_cast<unsigned char>(head.back()))) head.pop_back();
  return head + "… " + std::string(link);
}

std::string format_short_text(const compose::Post& post, std::size_t limit) {
  return format_short_text(post.title, post.link, limit);
}

// --- image host -----------------------------------------------------------------

std::string host_image(std::span<const std::uint8_t> png, const HostConfig& cfg) {
  const std::string digest = sha256_hex(png);
  const auto path = cfg.dir / (digest + ".png");
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    std::filesystem::create_directories(cfg.dir, ec);
    if (ec) throw IoError("cannot create " + cfg.dir.string() + ": " + ec.message());
    fetch::write_file_atomic(path, as_chars(png));
  }
  return cfg.base_url + digest + ".png";
}

std::size_t sweep_hosted_images(const HostConfig& cfg, Timestamp now) {
  if (!cfg.retention) return 0;
  std::error_code ec;
  if (!std::filesystem::is_directory(cfg.dir, ec)) return 0;
  const Timestamp cutoff = now - *cfg.retention;
  std::size_t removed = 0;
  for (const auto& entry : std::filesystem::directory_iterator(cfg.dir)) {
    if (entry.path().extension() != ".png") continue;
    const auto written = std::chrono::time_point_cast<std::chrono::seconds>(
        std::chrono::file_clock::to_sys(entry.last_write_time()));
    if (written < cutoff && std::filesystem::remove(entry.path(), ec)) ++removed;
  }
  return removed;
}

// --- feed -------------------------------------------------------------------------

void to_json(nlohmann::json& j, const PostRecord& r) {
  j = nlohmann::json{{"image_url", r.image_url}, {"publish_date", format_iso8601(r.publish_date)},
                     {"title", r.title},         {"link", r.link},
                     {"post_id", r.post_id},     {"image_length", r.image_length}};
}

void from_json(const nlohmann::json& j, PostRecord& r) {
  j.at("image_url").get_to(r.image_url);
  auto date = parse_iso8601(j.at("publish_date").get<std::string>());
  if (!date) throw IoError("bad publish_date in post record");
  r.publish_date = *date;
  j.at("title").get_to(r.title);
  r.link = j.value("link", "");
  j.at("post_id").get_to(r.post_id);
  r.image_length = j.value("image_length", std::uint64_t{0});
}

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c < 0x80) {
      switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default:
          // XML 1.0 forbids the remaining C0 controls.
          if (c >= 0x20 || c == '\t' || c == '\n' || c == '\r') out.push_back(static_cast<char>(c));
      }
      ++i;
      continue;
    }
    // Copy well-formed multi-byte sequences; anything else becomes U+FFFD.
    std::size_t len = c >= 0xF0 && c <= 0xF4 ? 4 : c >= 0xE0 ? 3 : c >= 0xC2 && c <= 0xDF ? 2 : 0;
    bool valid = len != 0 && i + len <= text.size();
    char32_t cp = 0;
    if (valid) {
      cp = c & (len == 2 ? 0x1F : len == 3 ? 0x0F : 0x07);
      for (std::size_t k = 1; k < len; ++k) {
        const auto cc = static_cast<unsigned char>(text[i + k]);
        if ((cc & 0xC0) != 0x80) {
          valid = false;
          break;
        }
        cp = (cp << 6) | (cc & 0x3F);
      }
    }
    if (valid) {
      const bool overlong = (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000);
      const bool excluded = (cp >= 0xD800 && cp <= 0xDFFF) || cp == 0xFFFE || cp == 0xFFFF || cp > 0x10FFFF;
      valid = !overlong && !excluded;
    }
    if (valid) {
      out.append(text.substr(i, len));
      i += len;
    } else {
      out += "\xEF\xBF\xBD";
      ++i;
    }
  }
  return out;
}

std::string emit_rss(std::span<const PostRecord> records, const FeedMeta& meta) {
  std::vector<const PostRecord*> order;
  order.reserve(records.size());
  for (const auto& r : records) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [](const PostRecord* a, const PostRecord* b) {
    if (a->publish_date != b->publish_date) return a->publish_date > b->publish_date;
    return a->post_id < b->post_id;
  });

  std::ostringstream x;
  x << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<rss version=\"2.0\">\n"
    << "  <channel>\n"
    << "    <title>" << xml_escape(meta.title) << "</title>\n"
    << "    <link>" << xml_escape(meta.link) << "</link>\n"
    << "    <description>" << xml_escape(meta.description) << "</description>\n";
  if (!meta.language.empty()) x << "    <language>" << xml_escape(meta.language) << "</language>\n";
  if (!order.empty()) x << "    <lastBuildDate>" << format_rfc822(order.front()->publish_date) << "</lastBuildDate>\n";
  for (const auto* r : order) {
    x << "    <item>\n"
      << "      <title>" << xml_escape(r->title) << "</title>\n"
      << "      <link>" << xml_escape(r->link) << "</link>\n"
      << "      <enclosure url=\"" << xml_escape(r->image_url) << "\" length=\"" << r->image_length
      << "\" type=\"image/png\"/>\n"
      << "      <pubDate>" << format_rfc822(r->publish_date) << "</pubDate>\n"
      << "      <guid isPermaLink=\"false\">" << xml_escape(r->post_id) << "</guid>\n"
      << "    </item>\n";
  }
  x << "  </channel>\n</rss>\n";
  return x.str();
}

std::vector<PostRecord> load_records(const std::filesystem::path& path) {
  std::vector<PostRecord> out;
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line).get<PostRecord>());
    } catch (const nlohmann::json::exception& e) {
      throw IoError("corrupt post record in " + path.string() + ": " + e.what());
    }
  }
  return out;
}

void save_records(const std::filesystem::path& path, std::span<const PostRecord> records) {
  std::string content;
  for (const auto& r : records) content += nlohmann::json(r).dump() + "\n";
  fetch::write_file_atomic(path, content);
}

// --- static server ------------------------------------------------------------------

struct StaticServer::Impl {
  std::filesystem::path root;
  httplib::Server server;
  std::thread thread;
};

StaticServer::StaticServer(std::filesystem::path root) : impl_(std::make_unique<Impl>()) {
  impl_->root = std::move(root);
}

StaticServer::~StaticServer() {
  stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int StaticServer::start(const std::string& host, int port) {
  auto& s = impl_->server;
  s.set_file_extension_and_mimetype_mapping("xml", "application/rss+xml");
  if (!s.set_mount_point("/", impl_->root.string())) {
    throw IoError("cannot serve " + impl_->root.string() + ": not a directory");
  }
  const int bound = port == 0 ? s.bind_to_any_port(host) : (s.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  return bound;
}

void StaticServer::wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

void StaticServer::stop() { impl_->server.stop(); }

// --- ledger ---------------------------------------------------------------------------

struct DeliveryLedger::State {
  mutable std::mutex mu;
  std::set<std::string, std::less<>> delivered;
  std::set<std::string, std::less<>> in_flight;
  std::optional<std::filesystem::path> file;
};

namespace {
std::string ledger_key(std::string_view post_id, std::string_view channel) {
  std::string k(post_id);
  k.push_back('\x1f');
  k.append(channel);
  return k;
}
}  // namespace

DeliveryLedger::DeliveryLedger() : state_(std::make_unique<State>()) {}
DeliveryLedger::DeliveryLedger(DeliveryLedger&&) noexcept = default;
DeliveryLedger& DeliveryLedger::operator=(DeliveryLedger&&) noexcept = default;
DeliveryLedger::~DeliveryLedger() = default;

DeliveryLedger DeliveryLedger::open(const std::filesystem::path& file) {
  DeliveryLedger ledger;
  ledger.state_->file = file;
  std::ifstream in(file, std::ios::binary);
  if (!in) return ledger;
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!trim(line).empty()) lines.push_back(line);
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      const Receipt r = nlohmann::json::parse(lines[i]).get<Receipt>();
      if (r.ok()) ledger.state_->delivered.insert(ledger_key(r.post_id, r.channel));
    } catch (const nlohmann::json::exception& e) {
      // A torn final line is what an interrupted append leaves behind.
      if (i + 1 == lines.size()) break;
      throw IoError("corrupt delivery ledger " + file.string() + ": " + e.what());
    }
  }
  return ledger;
}

std::optional<DeliveryLedger::Claim> DeliveryLedger::claim(std::string_view post_id, std::string_view channel) {
  std::string key = ledger_key(post_id, channel);
  std::lock_guard lock(state_->mu);
  if (state_->delivered.contains(key) || state_->in_flight.contains(key)) return std::nullopt;
  state_->in_flight.insert(key);
  return Claim(this, std::move(key));
}

bool DeliveryLedger::delivered(std::string_view post_id, std::string_view channel) const {
  std::lock_guard lock(state_->mu);
  return state_->delivered.contains(ledger_key(post_id, channel));
}

std::size_t DeliveryLedger::delivered_count() const {
  std::lock_guard lock(state_->mu);
  return state_->delivered.size();
}

void DeliveryLedger::release(const std::string& key) {
  std::lock_guard lock(state_->mu);
  state_->in_flight.erase(key);
}

void DeliveryLedger::record(const std::string& key, const Receipt& receipt) {
  std::lock_guard lock(state_->mu);
  state_->in_flight.erase(key);
  if (state_->file) {
    std::ofstream out(*state_->file, std::ios::binary | std::ios::app);
    out << nlohmann::json(receipt).dump() << "\n";
    out.flush();
    if (!out) throw IoError("cannot append to delivery ledger " + state_->file->string());
  }
  if (receipt.ok()) state_->delivered.insert(key);
}

DeliveryLedger::Claim::Claim(Claim&& other) noexcept
    : ledger_(std::exchange(other.ledger_, nullptr)), key_(std::move(other.key_)) {}

DeliveryLedger::Claim::~Claim() {
  if (ledger_) ledger_->release(key_);
}

void DeliveryLedger::Claim::commit(const Receipt& receipt) {
  if (!ledger_) return;
  DeliveryLedger* l = std::exchange(ledger_, nullptr);
  l->record(key_, receipt);
}

// --- channels ---------------------------------------------------------------------------

std::string_view to_string(ChannelKind k) {
  switch (k) {
    case ChannelKind::FileSink: return "file";
    case ChannelKind::Webhook: return "webhook";
    case ChannelKind::ShortText: return "short_text";
    case ChannelKind::RssFeed: return "rss";
  }
  return "file";
}

std::optional<ChannelKind> parse_channel_kind(std::string_view text) {
  for (auto k : {ChannelKind::FileSink, ChannelKind::Webhook, ChannelKind::ShortText, ChannelKind::RssFeed}) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

void ChannelConfig::validate() const {
  const std::string label = "channel '" + (name.empty() ? std::string(to_string(kind)) : name) + "'";
  auto check_url = [&](const std::string& url) {
    try {
      fetch::split_url(url);
    } catch (const ConfigError& e) {
      throw ConfigError(label + ": " + e.what());
    }
  };
  switch (kind) {
    case ChannelKind::FileSink:
      if (dir.empty()) throw ConfigError(label + ": dir is required");
      break;
    case ChannelKind::Webhook:
      if (endpoint.empty()) throw ConfigError(label + ": endpoint is required");
      check_url(endpoint);
      if (token.empty()) throw ConfigError(label + ": token is required");
      break;
    case ChannelKind::ShortText:
      if (limit < kMinShortTextLimit) {
        throw ConfigError(label + ": limit must be at least " + std::to_string(kMinShortTextLimit));
      }
      if (endpoint.empty() && outbox.empty()) throw ConfigError(label + ": needs an endpoint or an outbox");
      if (!endpoint.empty()) check_url(endpoint);
      break;
    case ChannelKind::RssFeed:
      if (dir.empty()) throw ConfigError(label + ": dir is required");
      if (base_url.empty() || base_url.back() != '/') throw ConfigError(label + ": base_url must end with '/'");
      break;
  }
  if (retry.attempts < 1) throw ConfigError(label + ": retry attempts must be positive");
}

namespace {

class FileChannel final : public Channel {
 public:
  FileChannel(std::string name, std::filesystem::path dir) : name_(std::move(name)), dir_(std::move(dir)) {}
  const std::string& name() const override { return name_; }
  Receipt deliver(const compose::Post& post, std::span<const std::uint8_t> png) override {
    Receipt r = publish_file(post, png, dir_);
    r.channel = name_;
    return r;
  }

 private:
  std::string name_;
  std::filesystem::path dir_;
};

class WebhookChannel final : public Channel {
 public:
  explicit WebhookChannel(ChannelConfig cfg) : cfg_(std::move(cfg)) {}
  const std::string& name() const override { return cfg_.name; }
  Receipt deliver(const compose::Post& post, std::span<const std::uint8_t> png) override {
    Receipt r = publish_webhook(post, png, cfg_.endpoint, cfg_.token, cfg_.retry);
    r.channel = cfg_.name;
    return r;
  }

 private:
  ChannelConfig cfg_;
};

class ShortTextChannel final : public Channel {
 public:
  explicit ShortTextChannel(ChannelConfig cfg) : cfg_(std::move(cfg)) {}
  const std::string& name() const override { return cfg_.name; }
  Receipt deliver(const compose::Post& post, std::span<const std::uint8_t>) override {
    const std::string text = format_short_text(post, cfg_.limit);
    if (cfg_.endpoint.empty()) {
      std::lock_guard lock(mu_);
      std::ofstream out(cfg_.outbox, std::ios::binary | std::ios::app);
      out << nlohmann::json{{"post_id", post.post_id}, {"text", text}}.dump() << "\n";
      out.flush();
      if (!out) return failed(cfg_.name, post.post_id, 1, "IoError: cannot append to " + cfg_.outbox.string());
      Receipt r;
      r.channel = cfg_.name;
      r.post_id = post.post_id;
      r.status = DeliveryStatus::Delivered;
      r.attempts = 1;
      r.detail = text;
      r.artifacts = {cfg_.outbox.string()};
      return r;
    }
    const auto parts = fetch::split_url(cfg_.endpoint);
    const std::string payload = nlohmann::json{{"text", text}}.dump();
    const auto headers = auth_headers(cfg_.token);
    Receipt r = with_retries(cfg_.name, post.post_id, cfg_.retry, [&] {
      auto client = client_for(parts);
      return interpret(client->Post(parts.path, headers, payload, "application/json"));
    });
    return r;
  }

 private:
  ChannelConfig cfg_;
  std::mutex mu_;
};

class RssChannel final : public Channel {
 public:
  explicit RssChannel(ChannelConfig cfg) : cfg_(std::move(cfg)) {}
  const std::string& name() const override { return cfg_.name; }
  Receipt deliver(const compose::Post& post, std::span<const std::uint8_t> png) override {
    std::lock_guard lock(mu_);
    try {
      const HostConfig host{cfg_.dir / "images", cfg_.base_url + "images/", cfg_.retention};
      PostRecord rec;
      rec.image_url = host_image(png, host);
      rec.publish_date = post.created_at;
      rec.title = post.title;
      for (const auto& tag : post.hashtags) rec.title += (tag.starts_with('#') ? " " : " #") + tag;
      rec.link = post.link;
      rec.post_id = post.post_id;
      rec.image_length = png.size();

      const auto records_path = cfg_.dir / "records.jsonl";
      auto records = load_records(records_path);
      auto same = [&](const PostRecord& r) { return r.post_id == rec.post_id; };
      if (auto it = std::find_if(records.begin(), records.end(), same); it != records.end()) {
        *it = rec;
      } else {
        records.push_back(rec);
      }
      save_records(records_path, records);
      sweep_hosted_images(host, post.created_at);
      const auto feed_path = cfg_.dir / "feed.xml";
      fetch::write_file_atomic(feed_path, emit_rss(records, cfg_.feed));

      Receipt r;
      r.channel = cfg_.name;
      r.post_id = post.post_id;
      r.status = DeliveryStatus::Delivered;
      r.attempts = 1;
      r.detail = rec.image_url;
      r.artifacts = {feed_path.string(), rec.image_url};
      return r;
    } catch (const std::exception& e) {
      return failed(cfg_.name, post.post_id, 1, e.what());
    }
  }

 private:
  ChannelConfig cfg_;
  std::mutex mu_;
};

}  // namespace

std::unique_ptr<Channel> make_channel(const ChannelConfig& cfg) {
  cfg.validate();
  ChannelConfig c = cfg;
  if (c.name.empty()) c.name = std::string(to_string(c.kind));
  switch (c.kind) {
    case ChannelKind::FileSink: return std::make_unique<FileChannel>(c.name, c.dir);
    case ChannelKind::Webhook: return std::make_unique<WebhookChannel>(std::move(c));
    case ChannelKind::ShortText: return std::make_unique<ShortTextChannel>(std::move(c));
    case ChannelKind::RssFeed: return std::make_unique<RssChannel>(std::move(c));
  }
  throw ConfigError("unknown channel kind");
}

std::vector<Receipt> deliver_all(const compose::Post& post, std::span<const std::uint8_t> png,
                                 std::span<const std::unique_ptr<Channel>> channels, DeliveryLedger& ledger) {
  std::vector<Receipt> receipts(channels.size());
  std::vector<std::future<void>> running;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    Channel& ch = *channels[i];
    auto claim = ledger.claim(post.post_id, ch.name());
    if (!claim) {
      receipts[i] = Receipt{ch.name(), post.post_id, DeliveryStatus::Suppressed, 0, "already delivered", {}};
      continue;
    }
    running.push_back(std::async(std::launch::async, [&, i, c = std::move(*claim)]() mutable {
      Receipt r;
      try {
        r = ch.deliver(post, png);
      } catch (const std::exception& e) {
        r = failed(ch.name(), post.post_id, 0, e.what());
      }
      r.channel = ch.name();
      r.post_id = post.post_id;
      c.commit(r);
      receipts[i] = std::move(r);
    }));
  }
  for (auto& f : running) f.get();
  return receipts;
}

}  // namespace newsburst::publish
