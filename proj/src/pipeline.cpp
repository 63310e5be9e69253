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

#include "newsburst/pipeline.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include "newsburst/image.hpp"
#include "newsburst/textpipe.hpp"

namespace newsburst::pipeline {

// --- config ---------------------------------------------------------------

namespace {

using Keys = std::set<std::string_view>;

void reject_unknown(const YAML::Node& node, const Keys& known, const std::string& where) {
  if (!node.IsMap()) throw ConfigError(where + " must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!known.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const YAML::Node& node, const char* key, T& out, const std::string& where) {
  const auto v = node[key];
  if (!v) return;
  try {
    out = v.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("bad value for '" + std::string(key) + "' in " + where);
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  return (path.is_absolute() ? path : base / path).lexically_normal();
}

void read_path(const YAML::Node& node, const char* key, std::filesystem::path& out, const std::filesystem::path& base,
               const std::string& where) {
  std::string s;
  read(node, key, s, where);
  if (!s.empty()) out = resolve(base, s);
}

image::Rgb read_color(const YAML::Node& node, const char* key, image::Rgb fallback, const std::string& where) {
  std::string s;
  read(node, key, s, where);
  if (s.empty()) return fallback;
  auto c = image::parse_hex_color(s);
  if (!c) throw ConfigError("bad colour '" + s + "' for " + key + " in " + where);
  return *c;
}

ingest::FeedSource parse_source(const YAML::Node& n, std::size_t index) {
  const std::string where = "sources[" + std::to_string(index) + "]";
  reject_unknown(n, {"id", "name", "feed", "categories", "extract"}, where);
  ingest::FeedSource s;
  read(n, "id", s.source_id, where);
  read(n, "name", s.name, where);
  read(n, "feed", s.feed_url, where);
  if (s.name.empty()) s.name = s.source_id;
  if (const auto cats = n["categories"]) {
    if (!cats.IsMap()) throw ConfigError(where + ".categories must be a mapping");
    for (const auto& kv : cats) {
      const auto label = kv.second.as<std::string>();
      auto region = parse_region(label);
      if (!region) throw ConfigError(where + ".categories: '" + label + "' is not national or international");
      s.category_map.emplace(kv.first.as<std::string>(), *region);
    }
  }
  if (const auto ex = n["extract"]) {
    reject_unknown(ex, {"perex", "body", "image"}, where + ".extract");
    read(ex, "perex", s.rules.perex, where);
    read(ex, "body", s.rules.body, where);
    read(ex, "image", s.rules.image, where);
  }
  return s;
}

publish::ChannelConfig parse_channel(const YAML::Node& n, std::size_t index, const std::filesystem::path& base) {
  const std::string where = "channels[" + std::to_string(index) + "]";
  reject_unknown(n, {"kind", "name", "dir", "endpoint", "token", "token_env", "limit", "outbox", "base_url", "feed",
                     "retention_hours", "retry"},
                 where);
  publish::ChannelConfig c;
  std::string kind;
  read(n, "kind", kind, where);
  auto k = publish::parse_channel_kind(kind);
  if (!k) throw ConfigError(where + ": unknown kind '" + kind + "' (file, webhook, short_text, rss)");
  c.kind = *k;
  read(n, "name", c.name, where);
  if (c.name.empty()) c.name = std::string(publish::to_string(c.kind));
  read_path(n, "dir", c.dir, base, where);
  read(n, "endpoint", c.endpoint, where);
  read(n, "token", c.token, where);
  std::string token_env;
  read(n, "token_env", token_env, where);
  if (!token_env.empty() && c.token.empty()) {
    if (const char* v = std::getenv(token_env.c_str())) c.token = v;
  }
  read(n, "limit", c.limit, where);
  read_path(n, "outbox", c.outbox, base, where);
  read(n, "base_url", c.base_url, where);
  if (const auto f = n["feed"]) {
    reject_unknown(f, {"title", "link", "description", "language"}, where + ".feed");
    read(f, "title", c.feed.title, where);
    read(f, "link", c.feed.link, where);
    read(f, "description", c.feed.description, where);
    read(f, "language", c.feed.language, where);
  }
  if (n["retention_hours"]) {
    long hours = 0;
    read(n, "retention_hours", hours, where);
    if (hours <= 0) throw ConfigError(where + ": retention_hours must be positive");
    c.retention = std::chrono::hours(hours);
  }
  if (const auto r = n["retry"]) {
    reject_unknown(r, {"attempts", "base_delay_ms"}, where + ".retry");
    read(r, "attempts", c.retry.attempts, where);
    long ms = c.retry.base_delay.count();
    read(r, "base_delay_ms", ms, where);
    c.retry.base_delay = std::chrono::milliseconds(ms);
  }
  return c;
}

void require_file(const std::filesystem::path& p, const std::string& what) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(p, ec)) throw ConfigError(what + " not found: " + p.string());
}

}  // namespace

PipelineConfig parse_config(std::string_view yaml, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  if (!root || root.IsNull()) throw ConfigError("config is empty");
  const std::string top = "config";
  reject_unknown(root,
                 {"store", "window_hours", "threshold", "n_tokens", "max_window", "embedding", "lexicon", "stopwords",
                  "policy", "compose", "hashtags", "sources", "channels", "mirror", "fetch_timeout_seconds", "report"},
                 top);
  PipelineConfig cfg;
  read_path(root, "store", cfg.store, base_dir, top);
  read(root, "window_hours", cfg.window_hours, top);
  read(root, "threshold", cfg.tau, top);
  read(root, "n_tokens", cfg.n_tokens, top);
  read(root, "max_window", cfg.max_window, top);
  read_path(root, "lexicon", cfg.lexicon, base_dir, top);
  read_path(root, "stopwords", cfg.stopwords, base_dir, top);
  read_path(root, "mirror", cfg.mirror, base_dir, top);
  read_path(root, "report", cfg.report, base_dir, top);
  long timeout = cfg.fetch_timeout.count();
  read(root, "fetch_timeout_seconds", timeout, top);
  cfg.fetch_timeout = std::chrono::seconds(timeout);

  if (const auto e = root["embedding"]) {
    const std::string where = "embedding";
    reject_unknown(e, {"provider", "dimension", "seed", "path"}, where);
    std::string provider = "hash";
    read(e, "provider", provider, where);
    if (provider == "hash") {
      cfg.embedding.kind = EmbeddingSpec::Kind::Hash;
    } else if (provider == "table") {
      cfg.embedding.kind = EmbeddingSpec::Kind::Table;
    } else {
      throw ConfigError("embedding.provider must be hash or table, not '" + provider + "'");
    }
    read(e, "dimension", cfg.embedding.dimension, where);
    read(e, "seed", cfg.embedding.seed, where);
    read_path(e, "path", cfg.embedding.path, base_dir, where);
  }
  if (const auto p = root["policy"]) {
    const std::string where = "policy";
    reject_unknown(p, {"min_size", "min_distinct_sources", "important_min_size", "important_min_sources"}, where);
    read(p, "min_size", cfg.policy.min_size, where);
    read(p, "min_distinct_sources", cfg.policy.min_distinct_sources, where);
    read(p, "important_min_size", cfg.policy.important_min_size, where);
    read(p, "important_min_sources", cfg.policy.important_min_sources, where);
  }
  if (const auto c = root["compose"]) {
    const std::string where = "compose";
    reject_unknown(c, {"font", "placeholder", "palette", "font_rules"}, where);
    read_path(c, "font", cfg.font, base_dir, where);
    read_path(c, "placeholder", cfg.compose.placeholder_image, base_dir, where);
    if (const auto pal = c["palette"]) {
      reject_unknown(pal, {"blue", "orange", "yellow"}, "compose.palette");
      auto& p = cfg.compose.palette;
      p.blue = read_color(pal, "blue", p.blue, "compose.palette");
      p.orange = read_color(pal, "orange", p.orange, "compose.palette");
      p.yellow = read_color(pal, "yellow", p.yellow, "compose.palette");
    }
    if (const auto fr = c["font_rules"]) {
      const std::string w = "compose.font_rules";
      reject_unknown(fr, {"large_max_chars", "large_pt", "small_pt", "reference_canvas", "frame_width_ratio",
                          "margin_ratio", "condense"},
                     w);
      auto& r = cfg.compose.font_rules;
      read(fr, "large_max_chars", r.large_max_chars, w);
      read(fr, "large_pt", r.large_pt, w);
      read(fr, "small_pt", r.small_pt, w);
      read(fr, "reference_canvas", r.reference_canvas, w);
      read(fr, "frame_width_ratio", r.frame_width_ratio, w);
      read(fr, "margin_ratio", r.margin_ratio, w);
      read(fr, "condense", r.condense, w);
    }
  }
  read(root, "hashtags", cfg.compose.hashtags, top);
  if (const auto s = root["sources"]) {
    if (!s.IsSequence()) throw ConfigError("sources must be a list");
    for (std::size_t i = 0; i < s.size(); ++i) cfg.sources.push_back(parse_source(s[i], i));
  }
  if (const auto ch = root["channels"]) {
    if (!ch.IsSequence()) throw ConfigError("channels must be a list");
    for (std::size_t i = 0; i < ch.size(); ++i) cfg.channels.push_back(parse_channel(ch[i], i, base_dir));
  }
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = fetch::read_file(path);
  } catch (const IoError&) {
    throw ConfigError("cannot read config file " + path.string());
  }
  auto base = std::filesystem::absolute(path).parent_path();
  return parse_config(text, base);
}

void PipelineConfig::validate() const {
  if (store.empty()) throw ConfigError("store directory is required");
  if (!(window_hours > 0.0)) throw ConfigError("window_hours must be positive");
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("threshold must lie strictly between 0 and 1");
  if (n_tokens < 1) throw ConfigError("n_tokens must be at least 1");
  if (max_window < 1) throw ConfigError("max_window must be at least 1");
  if (fetch_timeout.count() <= 0) throw ConfigError("fetch_timeout_seconds must be positive");

  std::set<std::string> ids;
  for (const auto& s : sources) {
    if (s.source_id.empty()) throw ConfigError("every source needs an id");
    if (!ids.insert(s.source_id).second) throw ConfigError("duplicate source id '" + s.source_id + "'");
    if (s.feed_url.empty()) throw ConfigError("source '" + s.source_id + "' has no feed URL");
    try {
      fetch::split_url(s.feed_url);
    } catch (const ConfigError& e) {
      throw ConfigError("source '" + s.source_id + "': " + e.what());
    }
    if (s.rules.body.empty()) throw ConfigError("source '" + s.source_id + "' has no body selector");
  }

  if (embedding.kind == EmbeddingSpec::Kind::Hash) {
    if (embedding.dimension < 1) throw ConfigError("embedding.dimension must be positive");
  } else {
    require_file(embedding.path, "vector table");
  }
  if (!lexicon.empty()) require_file(lexicon, "lexicon");
  if (!stopwords.empty()) require_file(stopwords, "stop list");
  policy.validate();

  require_file(font, "font");
  require_file(compose.placeholder_image, "placeholder image");
  const auto& r = compose.font_rules;
  if (!(r.large_pt > 0 && r.small_pt > 0 && r.reference_canvas > 0)) {
    throw ConfigError("font sizes and reference canvas must be positive");
  }
  if (!(r.frame_width_ratio > 0 && r.frame_width_ratio < 0.5)) throw ConfigError("frame_width_ratio out of range");
  if (!(r.margin_ratio > 0 && r.margin_ratio < 0.5)) throw ConfigError("margin_ratio out of range");
  if (!(r.condense > 0 && r.condense <= 2)) throw ConfigError("condense out of range");

  std::set<std::string> names;
  for (const auto& c : channels) {
    c.validate();
    if (!names.insert(c.name).second) throw ConfigError("duplicate channel name '" + c.name + "'");
  }
  if (!mirror.empty()) {
    std::error_code ec;
    if (!std::filesystem::is_directory(mirror, ec)) throw ConfigError("mirror is not a directory: " + mirror.string());
  }
}

// --- report ----------------------------------------------------------------

bool RunReport::partial_failure() const {
  if (!errors.empty()) return true;
  return std::any_of(receipts.begin(), receipts.end(),
                     [](const publish::Receipt& r) { return r.status == publish::DeliveryStatus::Failed; });
}

nlohmann::json report_json(const RunReport& r, bool with_timings) {
  nlohmann::json j;
  j["now"] = format_iso8601(r.now);
  j["counts"] = {{"fetched", r.fetched},
                 {"stored", r.stored},
                 {"failed_extractions", r.failed_extractions},
                 {"windowed", r.windowed},
                 {"vectorized", r.vectorized},
                 {"skipped", r.skipped},
                 {"cliques", r.cliques},
                 {"clusters", r.clusters},
                 {"eligible", r.eligible},
                 {"published", r.published},
                 {"suppressed", r.suppressed}};
  j["clusters"] = nlohmann::json::array();
  for (const auto& c : r.cluster_details) {
    j["clusters"].push_back({{"members", c.members},
                             {"size", c.score.size},
                             {"distinct_sources", c.score.distinct_sources},
                             {"time_span", c.score.time_span},
                             {"avg_length", c.score.avg_length},
                             {"eligible", c.eligible},
                             {"post_id", c.post_id}});
  }
  j["receipts"] = r.receipts;
  j["errors"] = nlohmann::json::array();
  for (const auto& e : r.errors) {
    j["errors"].push_back({{"stage", e.stage}, {"subject", e.subject}, {"message", e.message}});
  }
  j["warnings"] = r.warnings;
  if (with_timings) j["timings_ms"] = r.timings_ms;
  return j;
}

std::string format_report(const RunReport& r, bool with_timings) {
  std::ostringstream o;
  o << "run at " << format_iso8601(r.now) << "\n";
  auto line = [&](const char* name, std::size_t v) {
    o << "  " << name << std::string(20 - std::strlen(name), ' ') << v << "\n";
  };
  line("fetched", r.fetched);
  line("stored", r.stored);
  line("failed_extractions", r.failed_extractions);
  line("windowed", r.windowed);
  line("vectorized", r.vectorized);
  line("skipped", r.skipped);
  line("cliques", r.cliques);
  line("clusters", r.clusters);
  line("eligible", r.eligible);
  line("published", r.published);
  line("suppressed", r.suppressed);
  for (const auto& c : r.cluster_details) {
    if (!c.eligible) continue;
    o << "cluster of " << c.score.size << " from " << c.score.distinct_sources << " sources, span "
      << c.score.time_span << "s";
    if (!c.post_id.empty()) o << " -> " << c.post_id;
    o << "\n";
  }
  for (const auto& rc : r.receipts) {
    o << "  " << rc.channel << " " << rc.post_id << " " << publish::to_string(rc.status);
    if (!rc.detail.empty() && !rc.ok()) o << ": " << rc.detail;
    o << "\n";
  }
  for (const auto& e : r.errors) o << "error [" << e.stage << "] " << e.subject << ": " << e.message << "\n";
  for (const auto& w : r.warnings) o << "warning: " << w << "\n";
  if (with_timings) {
    for (const auto& [stage, ms] : r.timings_ms) o << "  time " << stage << " " << ms << " ms\n";
  }
  return o.str();
}

// --- stages ----------------------------------------------------------------

std::unique_ptr<fetch::Fetcher> make_fetcher(const PipelineConfig& cfg) {
  if (!cfg.mirror.empty()) return std::make_unique<fetch::MirrorFetcher>(cfg.mirror);
  return std::make_unique<fetch::HttpFetcher>(cfg.fetch_timeout);
}

StoreLock::StoreLock(const std::filesystem::path& store) {
  const auto path = store / ".lock";
  fd_ = ::open(path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
  if (fd_ < 0) throw IoError("cannot open lock file " + path.string() + ": " + std::strerror(errno));
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw IoError("another run holds the store lock " + path.string());
  }
}

StoreLock::~StoreLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

namespace {

struct SourceHarvest {
  std::vector<Article> articles;
  std::vector<StageError> errors;
  std::vector<std::string> warnings;
  std::size_t failed_extractions = 0;
};

SourceHarvest harvest(const ingest::FeedSource& source, fetch::Fetcher& fetcher, Timestamp now) {
  SourceHarvest h;
  std::vector<ingest::FeedEntry> entries;
  try {
    entries = ingest::poll_feed(source, fetcher.get(source.feed_url), &h.warnings);
  } catch (const Error& e) {
    h.errors.push_back({"ingest", source.source_id, e.what()});
    return h;
  }
  for (const auto& entry : entries) {
    try {
      h.articles.push_back(ingest::read_article(entry, fetcher.get(entry.link), source.rules, now));
    } catch (const ingest::ExtractionFailed& e) {
      ++h.failed_extractions;
      h.errors.push_back({"extract", entry.link, e.what()});
    } catch (const Error& e) {
      h.errors.push_back({"ingest", entry.link, e.what()});
    }
  }
  return h;
}

struct TextResources {
  text::Lexicon lexicon;
  text::StopList stops;
  std::unique_ptr<embed::EmbeddingProvider> provider;
};

TextResources load_text_resources(const PipelineConfig& cfg) {
  TextResources r;
  if (!cfg.lexicon.empty()) r.lexicon = text::Lexicon::load(cfg.lexicon);
  if (!cfg.stopwords.empty()) r.stops = text::StopList::load(cfg.stopwords);
  try {
    if (cfg.embedding.kind == EmbeddingSpec::Kind::Hash) {
      r.provider = embed::hash_provider(cfg.embedding.dimension, cfg.embedding.seed);
    } else {
      r.provider = embed::load_table_provider(cfg.embedding.path);
    }
  } catch (const embed::BadVectorFile& e) {
    throw ConfigError(std::string("vector table: ") + e.what());
  }
  return r;
}

class Stopwatch {
 public:
  Stopwatch(RunReport& report, std::string stage)
      : report_(report), stage_(std::move(stage)), start_(std::chrono::steady_clock::now()) {}
  ~Stopwatch() {
    const auto elapsed = std::chrono::steady_clock::now() - start_;
    report_.timings_ms[stage_] += std::chrono::duration<double, std::milli>(elapsed).count();
  }

 private:
  RunReport& report_;
  std::string stage_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

void ingest_sources(const PipelineConfig& cfg, ingest::ArticleStore& store, fetch::Fetcher& fetcher, Timestamp now,
                    RunReport& report) {
  Stopwatch sw(report, "ingest");
  std::vector<std::future<SourceHarvest>> running;
  for (const auto& s : cfg.sources) {
    running.push_back(std::async(std::launch::async, [&s, &fetcher, now] { return harvest(s, fetcher, now); }));
  }
  // Store writes stay on this thread, in source order.
  for (auto& f : running) {
    SourceHarvest h = f.get();
    report.failed_extractions += h.failed_extractions;
    report.errors.insert(report.errors.end(), h.errors.begin(), h.errors.end());
    report.warnings.insert(report.warnings.end(), h.warnings.begin(), h.warnings.end());
    for (auto& a : h.articles) {
      ++report.fetched;
      if (const Article* prior = store.find(a.article_id)) {
        if (content_hash(*prior) == content_hash(a)) continue;
        a.published_at = std::min(prior->published_at, a.fetched_at);
      }
      const std::string id = a.article_id;
      try {
        store.upsert(std::move(a));
        ++report.stored;
      } catch (const IoError& e) {
        report.errors.push_back({"store", id, e.what()});
      }
    }
  }
}

namespace {

WindowAnalysis analyze_with(const PipelineConfig& cfg, const TextResources& res, const ingest::ArticleStore& store,
                            Timestamp now, RunReport& report) {
  WindowAnalysis w;
  {
    Stopwatch sw(report, "vectorize");
    const auto duration = std::chrono::seconds(std::llround(cfg.window_hours * 3600.0));
    const auto window = ingest::select_window(store, now, duration);
    report.windowed = window.size();
    const embed::VectorizeConfig vc{cfg.n_tokens};
    for (const auto& a : window) {
      try {
        w.vectors.push_back(embed::vectorize_article(a, *res.provider, vc, res.lexicon, res.stops));
        w.articles.push_back(a);
      } catch (const embed::NoEmbeddableTokens&) {
        ++report.skipped;
        report.warnings.push_back("no embeddable tokens in " + a.article_id);
      }
    }
    report.vectorized = w.vectors.size();
  }

  Stopwatch sw(report, "cluster");
  if (w.vectors.size() > cfg.max_window) {
    throw cluster::WindowTooLarge("window holds " + std::to_string(w.vectors.size()) + " articles, cap is " +
                                  std::to_string(cfg.max_window));
  }
  w.matrix = cluster::similarity_matrix(w.vectors);
  const auto graph = cluster::build_threshold_graph(w.matrix, cfg.tau);
  w.cliques = cluster::enumerate_cliques(graph, cfg.max_window);
  report.cliques = w.cliques.size();

  std::map<std::string, const Article*, std::less<>> by_id;
  for (const auto& a : w.articles) by_id.emplace(a.article_id, &a);
  std::vector<cluster::Clique> cliques;
  cliques.reserve(w.cliques.size());
  for (const auto& nodes : w.cliques) {
    cluster::Clique c;
    for (auto i : nodes) c.push_back(w.articles[i].article_id);
    std::sort(c.begin(), c.end());
    cliques.push_back(std::move(c));
  }
  w.clusters = cluster::dedup_clusters(std::move(cliques), [&](const cluster::Clique& c) {
    std::vector<Article> members;
    for (const auto& id : c) members.push_back(*by_id.at(id));
    return score::score_cluster(members);
  });
  report.clusters = w.clusters.size();
  return w;
}

}  // namespace

WindowAnalysis analyze_window(const PipelineConfig& cfg, const ingest::ArticleStore& store, Timestamp now,
                              RunReport& report) {
  return analyze_with(cfg, load_text_resources(cfg), store, now, report);
}

namespace {

struct StoredPost {
  compose::Post post;
  std::vector<std::string> members;
};

std::vector<StoredPost> load_posts(const std::filesystem::path& path) {
  std::vector<StoredPost> out;
  std::ifstream in(path, std::ios::binary);
  for (std::string line; std::getline(in, line);) {
    if (trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.push_back({j.at("post").get<compose::Post>(), j.at("members").get<std::vector<std::string>>()});
    } catch (const nlohmann::json::exception& e) {
      throw IoError("corrupt post store " + path.string() + ": " + e.what());
    }
  }
  return out;
}

void append_post(const std::filesystem::path& path, const StoredPost& p) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  out << nlohmann::json{{"post", p.post}, {"members", p.members}}.dump() << "\n";
  out.flush();
  if (!out) throw IoError("cannot append to " + path.string());
}

const StoredPost* overlapping_post(const std::vector<StoredPost>& posts, const std::vector<std::string>& members) {
  for (const auto& p : posts) {
    for (const auto& m : p.members) {
      if (std::binary_search(members.begin(), members.end(), m)) return &p;
    }
  }
  return nullptr;
}

std::vector<std::uint8_t> to_bytes(const std::string& s) { return {s.begin(), s.end()}; }

}  // namespace

RunReport run_once(const PipelineConfig& cfg, Timestamp now, fetch::Fetcher& fetcher) {
  cfg.validate();
  RunReport report;
  report.now = now;

  const TextResources resources = load_text_resources(cfg);
  std::optional<image::Font> font;
  try {
    font.emplace(image::Font::load(cfg.font));
  } catch (const image::FontMissing& e) {
    throw ConfigError(e.what());
  }
  std::vector<std::unique_ptr<publish::Channel>> channels;
  for (const auto& c : cfg.channels) channels.push_back(publish::make_channel(c));

  std::error_code ec;
  std::filesystem::create_directories(cfg.store, ec);
  if (ec) throw ConfigError("cannot create store " + cfg.store.string() + ": " + ec.message());
  StoreLock lock(cfg.store);
  auto store = ingest::ArticleStore::open(cfg.store);

  ingest_sources(cfg, store, fetcher, now, report);

  WindowAnalysis w;
  try {
    w = analyze_with(cfg, resources, store, now, report);
  } catch (const cluster::WindowTooLarge& e) {
    report.errors.push_back({"cluster", "window", e.what()});
    return report;
  }

  Stopwatch sw(report, "publish");
  std::map<std::string, ingest::CategoryMap> category_maps;
  for (const auto& s : cfg.sources) category_maps.emplace(s.source_id, s.category_map);
  const auto posts_path = cfg.store / "posts.jsonl";
  auto posts = load_posts(posts_path);
  auto ledger = publish::DeliveryLedger::open(cfg.store / "ledger.jsonl");

  std::map<std::string, std::optional<std::vector<std::uint8_t>>> image_cache;
  compose::ImageLoader load_image = [&](const std::string& url) -> std::optional<std::vector<std::uint8_t>> {
    if (auto it = image_cache.find(url); it != image_cache.end()) return it->second;
    std::optional<std::vector<std::uint8_t>> bytes;
    try {
      if (url.starts_with("file://")) {
        bytes = to_bytes(fetch::read_file(url.substr(7)));
      } else {
        bytes = to_bytes(fetcher.get(url));
      }
    } catch (const Error& e) {
      report.warnings.push_back("image unavailable: " + url + ": " + e.what());
    }
    image_cache.emplace(url, bytes);
    return bytes;
  };

  for (const auto& c : w.clusters) {
    ClusterSummary summary{c.members, c.score, score::should_publish(c.score, cfg.policy), ""};
    if (!summary.eligible) {
      report.cluster_details.push_back(std::move(summary));
      continue;
    }
    ++report.eligible;
    try {
      std::vector<Article> members;
      for (const auto& id : c.members) {
        members.push_back(*std::find_if(w.articles.begin(), w.articles.end(),
                                        [&](const Article& a) { return a.article_id == id; }));
      }
      const std::string rep_id = compose::select_representative(members, w.vectors);
      const Article& rep =
          *std::find_if(members.begin(), members.end(), [&](const Article& a) { return a.article_id == rep_id; });
      const auto category = score::classify(members, c.score, cfg.policy, rep, category_maps);
      compose::Post post = compose::build_post(c, w.articles, w.vectors, category, cfg.compose, now, load_image);

      const StoredPost* prior = overlapping_post(posts, c.members);
      if (prior) post.post_id = prior->post.post_id;
      summary.post_id = post.post_id;

      const bool everywhere = std::all_of(channels.begin(), channels.end(), [&](const auto& ch) {
        return ledger.delivered(post.post_id, ch->name());
      });
      if (prior && everywhere) {
        ++report.suppressed;
        report.cluster_details.push_back(std::move(summary));
        continue;
      }

      const auto source_bytes = load_image(post.image.source_image_url);
      if (!source_bytes) throw image::DecodeFailed("cannot load " + post.image.source_image_url);
      const auto png = compose::render_image(post.image, *source_bytes, *font);
      if (!prior) {
        posts.push_back({post, c.members});
        append_post(posts_path, posts.back());
      }
      const auto receipts = publish::deliver_all(post, png, channels, ledger);
      const bool delivered = std::any_of(receipts.begin(), receipts.end(), [](const auto& r) { return r.ok(); });
      if (delivered || (channels.empty() && !prior)) ++report.published;
      report.receipts.insert(report.receipts.end(), receipts.begin(), receipts.end());
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      report.errors.push_back({"compose", c.members.front(), e.what()});
    }
    report.cluster_details.push_back(std::move(summary));
  }
  return report;
}

RunReport run_once(const PipelineConfig& cfg, Timestamp now) {
  cfg.validate();
  auto fetcher = make_fetcher(cfg);
  return run_once(cfg, now, *fetcher);
}

}  // namespace newsburst::pipeline
