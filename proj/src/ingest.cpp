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

#include "newsburst/ingest.hpp"

#include <expat.h>
#include <unicode/ucnv.h>

#include <algorithm>
#include <fstream>
#include <memory>
#include <sstream>

#include <nlohmann/json.hpp>

#include "newsburst/fetch.hpp"
#include "newsburst/html.hpp"

namespace newsburst::ingest {

namespace {

// Minimal element tree; feeds are small enough to hold in memory.
struct XmlElement {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::string text;
  std::vector<std::unique_ptr<XmlElement>> children;

  std::string_view local_name() const {
    const auto colon = name.rfind(':');
    return colon == std::string::npos ? std::string_view(name) : std::string_view(name).substr(colon + 1);
  }
  bool prefixed() const { return name.find(':') != std::string::npos; }

  std::optional<std::string_view> attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes) {
      if (k == key) return std::string_view(v);
    }
    return std::nullopt;
  }

  /// First child with the given local name, preferring unprefixed names.
  const XmlElement* child(std::string_view local) const {
    const XmlElement* fallback = nullptr;
    for (const auto& c : children) {
      if (c->local_name() != local) continue;
      if (!c->prefixed()) return c.get();
      if (fallback == nullptr) fallback = c.get();
    }
    return fallback;
  }

  std::string child_text(std::string_view local) const {
    const XmlElement* c = child(local);
    return c ? trim(c->text) : std::string();
  }
};

struct ParseState {
  std::unique_ptr<XmlElement> root;
  std::vector<XmlElement*> stack;
};

void XMLCALL on_start(void* user, const XML_Char* name, const XML_Char** attrs) {
  auto* st = static_cast<ParseState*>(user);
  auto el = std::make_unique<XmlElement>();
  el->name = name;
  for (int i = 0; attrs[i] != nullptr; i += 2) el->attributes.emplace_back(attrs[i], attrs[i + 1]);
  XmlElement* raw = el.get();
  if (st->stack.empty()) {
    st->root = std::move(el);
  } else {
    st->stack.back()->children.push_back(std::move(el));
  }
  st->stack.push_back(raw);
}

void XMLCALL on_end(void* user, const XML_Char*) { static_cast<ParseState*>(user)->stack.pop_back(); }

void XMLCALL on_text(void* user, const XML_Char* s, int len) {
  auto* st = static_cast<ParseState*>(user);
  if (!st->stack.empty()) st->stack.back()->text.append(s, static_cast<std::size_t>(len));
}

// Expat only knows UTF-8/16, ISO-8859-1 and ASCII natively; single-byte
// legacy encodings (windows-1250, iso-8859-2, ...) are mapped through ICU.
int XMLCALL on_unknown_encoding(void*, const XML_Char* name, XML_Encoding* info) {
  UErrorCode err = U_ZERO_ERROR;
  UConverter* conv = ucnv_open(name, &err);
  if (U_FAILURE(err)) return XML_STATUS_ERROR;
  if (ucnv_getMaxCharSize(conv) != 1) {
    ucnv_close(conv);
    return XML_STATUS_ERROR;
  }
  for (int b = 0; b < 256; ++b) {
    const char in = static_cast<char>(b);
    UChar out[4];
    err = U_ZERO_ERROR;
    const int32_t n = ucnv_toUChars(conv, out, 4, &in, 1, &err);
    info->map[b] = (U_SUCCESS(err) && n == 1) ? out[0] : -1;
  }
  ucnv_close(conv);
  info->data = nullptr;
  info->convert = nullptr;
  info->release = nullptr;
  return XML_STATUS_OK;
}

std::unique_ptr<XmlElement> parse_xml(std::string_view bytes) {
  ParseState state;
  std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(XML_ParserCreate(nullptr), &XML_ParserFree);
  if (!parser) throw Error("cannot allocate XML parser");
  XML_SetUserData(parser.get(), &state);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_text);
  XML_SetUnknownEncodingHandler(parser.get(), on_unknown_encoding, nullptr);
  if (XML_Parse(parser.get(), bytes.data(), static_cast<int>(bytes.size()), XML_TRUE) == XML_STATUS_ERROR) {
    std::ostringstream msg;
    msg << "malformed feed at line " << XML_GetCurrentLineNumber(parser.get()) << ": "
        << XML_ErrorString(XML_GetErrorCode(parser.get()));
    throw MalformedFeed(msg.str());
  }
  if (!state.root) throw MalformedFeed("malformed feed: no root element");
  return std::move(state.root);
}

void warn(std::vector<std::string>* warnings, std::string message) {
  if (warnings != nullptr) warnings->push_back(std::move(message));
}

// Shared tail of RSS and Atom item handling.
void accept_entry(const FeedSource& source, FeedEntry entry, std::string_view date_text,
                  std::vector<FeedEntry>& out, std::vector<std::string>* warnings) {
  if (entry.guid.empty()) entry.guid = entry.link;
  if (entry.guid.empty()) {
    warn(warnings, source.source_id + ": skipped entry without guid or link ('" + entry.title + "')");
    return;
  }
  auto published = parse_timestamp(date_text);
  if (!published) {
    warn(warnings, source.source_id + ": skipped entry " + entry.guid + " with missing or unparseable date");
    return;
  }
  entry.source_id = source.source_id;
  entry.published_at = *published;
  out.push_back(std::move(entry));
}

void read_rss_items(const FeedSource& source, const XmlElement& parent, std::vector<FeedEntry>& out,
                    std::vector<std::string>* warnings) {
  for (const auto& item : parent.children) {
    if (item->local_name() != "item") continue;
    FeedEntry e;
    e.title = item->child_text("title");
    e.guid = item->child_text("guid");
    for (const auto& c : item->children) {
      if (c->local_name() == "link" && !trim(c->text).empty()) {
        e.link = trim(c->text);
        if (!c->prefixed()) break;
      }
    }
    for (const auto& c : item->children) {
      if (c->local_name() == "category" || c->local_name() == "subject") {
        std::string cat = trim(c->text);
        if (!cat.empty()) e.categories.push_back(std::move(cat));
      }
    }
    std::string date = item->child_text("pubDate");
    if (date.empty()) date = item->child_text("date");
    accept_entry(source, std::move(e), date, out, warnings);
  }
}

void read_atom_entries(const FeedSource& source, const XmlElement& feed, std::vector<FeedEntry>& out,
                       std::vector<std::string>* warnings) {
  for (const auto& item : feed.children) {
    if (item->local_name() != "entry") continue;
    FeedEntry e;
    e.title = item->child_text("title");
    e.guid = item->child_text("id");
    for (const auto& c : item->children) {
      if (c->local_name() != "link") continue;
      auto rel = c->attribute("rel");
      if (rel && *rel != "alternate") continue;
      if (auto href = c->attribute("href")) {
        e.link = trim(*href);
        break;
      }
    }
    for (const auto& c : item->children) {
      if (c->local_name() != "category") continue;
      auto term = c->attribute("term");
      std::string cat = trim(term ? *term : std::string_view(c->text));
      if (!cat.empty()) e.categories.push_back(std::move(cat));
    }
    std::string date = item->child_text("published");
    if (date.empty()) date = item->child_text("updated");
    accept_entry(source, std::move(e), date, out, warnings);
  }
}

}  // namespace

std::vector<FeedEntry> poll_feed(const FeedSource& source, std::string_view raw_xml,
                                 std::vector<std::string>* warnings) {
  const auto root = parse_xml(raw_xml);
  std::vector<FeedEntry> out;
  const std::string_view kind = root->local_name();
  if (kind == "rss") {
    const XmlElement* channel = root->child("channel");
    if (channel == nullptr) throw MalformedFeed("RSS document without <channel>");
    read_rss_items(source, *channel, out, warnings);
  } else if (kind == "RDF") {
    read_rss_items(source, *root, out, warnings);
  } else if (kind == "feed") {
    read_atom_entries(source, *root, out, warnings);
  } else {
    throw MalformedFeed("unrecognised feed root element <" + root->name + ">");
  }
  return out;
}

Article read_article(const FeedEntry& entry, std::string_view page, const ExtractionRules& rules,
                     Timestamp fetched_at) {
  const auto doc = html::Document::parse(page);

  std::vector<std::string> blocks;
  if (!rules.body.empty()) {
    for (auto id : doc.select(rules.body)) {
      std::string text = doc.text_content(id);
      if (!text.empty()) blocks.push_back(std::move(text));
    }
  }
  if (blocks.empty()) {
    throw ExtractionFailed("no body text for " + entry.link + " (selector '" + rules.body + "')");
  }

  Article a;
  a.source_id = entry.source_id;
  a.article_id = make_article_id(entry.source_id, entry.guid);
  a.url = entry.link;
  a.categories = entry.categories;
  a.fetched_at = fetched_at;
  a.published_at = std::min(entry.published_at, fetched_at);

  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (i > 0) a.body += "\n\n";
    a.body += blocks[i];
  }

  if (!rules.perex.empty()) {
    for (auto id : doc.select(rules.perex)) {
      std::string text = doc.text_content(id);
      if (!text.empty()) {
        a.perex = std::move(text);
        break;
      }
    }
  }

  if (!rules.image.empty()) {
    for (auto id : doc.select(rules.image)) {
      const auto& node = doc.node(id);
      std::optional<std::string_view> ref;
      for (std::string_view attr : {"src", "content", "href", "data-src"}) {
        ref = node.attribute(attr);
        if (ref && !trim(*ref).empty()) break;
        ref.reset();
      }
      if (ref) {
        a.image_url = html::resolve_url(entry.link, *ref);
        break;
      }
    }
  }

  a.title = trim(entry.title);
  if (a.title.empty()) {
    for (std::string_view sel : {"h1", "meta[property=og:title]", "title"}) {
      auto hits = doc.select(sel);
      if (hits.empty()) continue;
      const auto& node = doc.node(hits.front());
      a.title = node.name == "meta" ? trim(node.attribute("content").value_or("")) : doc.text_content(hits.front());
      if (!a.title.empty()) break;
    }
  }
  if (a.title.empty()) throw ExtractionFailed("no title for " + entry.link);
  return a;
}

// --- store ----------------------------------------------------------------

ArticleStore ArticleStore::open(const std::filesystem::path& dir) {
  ArticleStore store;
  const auto records = dir / "articles";
  std::error_code ec;
  std::filesystem::create_directories(records, ec);
  if (ec) throw IoError("cannot create article store at " + records.string() + ": " + ec.message());
  for (const auto& entry : std::filesystem::directory_iterator(records)) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    try {
      Article a = nlohmann::json::parse(in).get<Article>();
      store.records_.insert_or_assign(a.article_id, std::move(a));
    } catch (const nlohmann::json::exception& e) {
      throw IoError("corrupt article record " + entry.path().string() + ": " + e.what());
    }
  }
  store.dir_ = dir;
  return store;
}

UpsertResult ArticleStore::upsert(Article article) {
  if (dir_) {
    const nlohmann::json j = article;
    fetch::write_file_atomic(*dir_ / "articles" / (article.article_id + ".json"), j.dump(2) + "\n");
  }
  auto [it, inserted] = records_.insert_or_assign(article.article_id, std::move(article));
  return inserted ? UpsertResult::Inserted : UpsertResult::Updated;
}

const Article* ArticleStore::find(std::string_view article_id) const {
  auto it = records_.find(article_id);
  return it == records_.end() ? nullptr : &it->second;
}

UpsertResult upsert_article(ArticleStore& store, Article article) { return store.upsert(std::move(article)); }

std::vector<Article> select_window(const ArticleStore& store, Timestamp now, std::chrono::seconds duration) {
  if (duration <= std::chrono::seconds::zero()) throw PreconditionError("window duration must be positive");
  const Timestamp oldest_excluded = now - duration;
  std::vector<Article> out;
  for (const auto& [id, a] : store.records()) {
    if (a.published_at > oldest_excluded && a.published_at <= now) out.push_back(a);
  }
  std::sort(out.begin(), out.end(), [](const Article& x, const Article& y) {
    return std::tie(x.published_at, x.article_id) < std::tie(y.published_at, y.article_id);
  });
  return out;
}

}  // namespace newsburst::ingest

namespace newsburst {

void to_json(nlohmann::json& j, const Article& a) {
  j = nlohmann::json{{"article_id", a.article_id},
                     {"source_id", a.source_id},
                     {"url", a.url},
                     {"title", a.title},
                     {"perex", a.perex},
                     {"body", a.body},
                     {"image_url", a.image_url ? nlohmann::json(*a.image_url) : nlohmann::json(nullptr)},
                     {"published_at", format_iso8601(a.published_at)},
                     {"fetched_at", format_iso8601(a.fetched_at)},
                     {"categories", a.categories}};
}

void from_json(const nlohmann::json& j, Article& a) {
  j.at("article_id").get_to(a.article_id);
  j.at("source_id").get_to(a.source_id);
  j.at("url").get_to(a.url);
  j.at("title").get_to(a.title);
  j.at("perex").get_to(a.perex);
  j.at("body").get_to(a.body);
  const auto& img = j.at("image_url");
  a.image_url = img.is_null() ? std::nullopt : std::optional<std::string>(img.get<std::string>());
  auto parse = [&](const char* key) {
    auto t = parse_iso8601(j.at(key).get<std::string>());
    if (!t) throw nlohmann::json::other_error::create(501, std::string("bad timestamp in ") + key, &j);
    return *t;
  };
  a.published_at = parse("published_at");
  a.fetched_at = parse("fetched_at");
  j.at("categories").get_to(a.categories);
}

}  // namespace newsburst
