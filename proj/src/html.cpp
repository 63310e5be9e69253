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

#include "newsburst/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <functional>

namespace newsburst::html {

namespace {

bool is_one_of(std::string_view name, std::initializer_list<std::string_view> set) {
  return std::find(set.begin(), set.end(), name) != set.end();
}

bool is_void(std::string_view n) {
  return is_one_of(n, {"area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "param",
                       "source", "track", "wbr"});
}

bool is_inline(std::string_view n) {
  return is_one_of(n, {"a", "abbr", "b", "bdi", "bdo", "cite", "code", "data", "dfn", "em", "font", "i", "kbd",
                       "mark", "q", "s", "samp", "small", "span", "strong", "sub", "sup", "time", "u", "var"});
}

bool closes_paragraph(std::string_view n) {
  return is_one_of(n, {"address", "article", "aside", "blockquote", "details", "div", "dl", "fieldset",
                       "figcaption", "figure", "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6", "header",
                       "hr", "main", "nav", "ol", "p", "pre", "section", "table", "ul"});
}

bool is_block(std::string_view n) {
  return closes_paragraph(n) || is_one_of(n, {"br", "li", "dd", "dt", "td", "th", "tr", "body", "html",
                                               "title", "img", "figcaption"});
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool istarts_with(std::string_view text, std::size_t pos, std::string_view prefix) {
  if (text.size() - std::min(pos, text.size()) < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[pos + i])) != prefix[i]) return false;
  }
  return true;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

struct NamedEntity {
  std::string_view name;
  char32_t cp;
};

// HTML 4 named character references plus &apos;.
constexpr std::array<NamedEntity, 253> kEntities = {{
    {"apos", 0x0027},
    {"AElig", 0x00C6}, {"Aacute", 0x00C1}, {"Acirc", 0x00C2}, {"Agrave", 0x00C0}, {"Alpha", 0x0391}, {"Aring", 0x00C5},
    {"Atilde", 0x00C3}, {"Auml", 0x00C4}, {"Beta", 0x0392}, {"Ccedil", 0x00C7}, {"Chi", 0x03A7}, {"Dagger", 0x2021},
    {"Delta", 0x0394}, {"ETH", 0x00D0}, {"Eacute", 0x00C9}, {"Ecirc", 0x00CA}, {"Egrave", 0x00C8}, {"Epsilon", 0x0395},
    {"Eta", 0x0397}, {"Euml", 0x00CB}, {"Gamma", 0x0393}, {"Iacute", 0x00CD}, {"Icirc", 0x00CE}, {"Igrave", 0x00CC},
    {"Iota", 0x0399}, {"Iuml", 0x00CF}, {"Kappa", 0x039A}, {"Lambda", 0x039B}, {"Mu", 0x039C}, {"Ntilde", 0x00D1},
    {"Nu", 0x039D}, {"OElig", 0x0152}, {"Oacute", 0x00D3}, {"Ocirc", 0x00D4}, {"Ograve", 0x00D2}, {"Omega", 0x03A9},
    {"Omicron", 0x039F}, {"Oslash", 0x00D8}, {"Otilde", 0x00D5}, {"Ouml", 0x00D6}, {"Phi", 0x03A6}, {"Pi", 0x03A0},
    {"Prime", 0x2033}, {"Psi", 0x03A8}, {"Rho", 0x03A1}, {"Scaron", 0x0160}, {"Sigma", 0x03A3}, {"THORN", 0x00DE},
    {"Tau", 0x03A4}, {"Theta", 0x0398}, {"Uacute", 0x00DA}, {"Ucirc", 0x00DB}, {"Ugrave", 0x00D9}, {"Upsilon", 0x03A5},
    {"Uuml", 0x00DC}, {"Xi", 0x039E}, {"Yacute", 0x00DD}, {"Yuml", 0x0178}, {"Zeta", 0x0396}, {"aacute", 0x00E1},
    {"acirc", 0x00E2}, {"acute", 0x00B4}, {"aelig", 0x00E6}, {"agrave", 0x00E0}, {"alefsym", 0x2135}, {"alpha", 0x03B1},
    {"amp", 0x0026}, {"and", 0x2227}, {"ang", 0x2220}, {"aring", 0x00E5}, {"asymp", 0x2248}, {"atilde", 0x00E3},
    {"auml", 0x00E4}, {"bdquo", 0x201E}, {"beta", 0x03B2}, {"brvbar", 0x00A6}, {"bull", 0x2022}, {"cap", 0x2229},
    {"ccedil", 0x00E7}, {"cedil", 0x00B8}, {"cent", 0x00A2}, {"chi", 0x03C7}, {"circ", 0x02C6}, {"clubs", 0x2663},
    {"cong", 0x2245}, {"copy", 0x00A9}, {"crarr", 0x21B5}, {"cup", 0x222A}, {"curren", 0x00A4}, {"dArr", 0x21D3},
    {"dagger", 0x2020}, {"darr", 0x2193}, {"deg", 0x00B0}, {"delta", 0x03B4}, {"diams", 0x2666}, {"divide", 0x00F7},
    {"eacute", 0x00E9}, {"ecirc", 0x00EA}, {"egrave", 0x00E8}, {"empty", 0x2205}, {"emsp", 0x2003}, {"ensp", 0x2002},
    {"epsilon", 0x03B5}, {"equiv", 0x2261}, {"eta", 0x03B7}, {"eth", 0x00F0}, {"euml", 0x00EB}, {"euro", 0x20AC},
    {"exist", 0x2203}, {"fnof", 0x0192}, {"forall", 0x2200}, {"frac12", 0x00BD}, {"frac14", 0x00BC}, {"frac34", 0x00BE},
    {"frasl", 0x2044}, {"gamma", 0x03B3}, {"ge", 0x2265}, {"gt", 0x003E}, {"hArr", 0x21D4}, {"harr", 0x2194},
    {"hearts", 0x2665}, {"hellip", 0x2026}, {"iacute", 0x00ED}, {"icirc", 0x00EE}, {"iexcl", 0x00A1}, {"igrave", 0x00EC},
    {"image", 0x2111}, {"infin", 0x221E}, {"int", 0x222B}, {"iota", 0x03B9}, {"iquest", 0x00BF}, {"isin", 0x2208},
    {"iuml", 0x00EF}, {"kappa", 0x03BA}, {"lArr", 0x21D0}, {"lambda", 0x03BB}, {"lang", 0x2329}, {"laquo", 0x00AB},
    {"larr", 0x2190}, {"lceil", 0x2308}, {"ldquo", 0x201C}, {"le", 0x2264}, {"lfloor", 0x230A}, {"lowast", 0x2217},
    {"loz", 0x25CA}, {"lrm", 0x200E}, {"lsaquo", 0x2039}, {"lsquo", 0x2018}, {"lt", 0x003C}, {"macr", 0x00AF},
    {"mdash", 0x2014}, {"micro", 0x00B5}, {"middot", 0x00B7}, {"minus", 0x2212}, {"mu", 0x03BC}, {"nabla", 0x2207},
    {"nbsp", 0x00A0}, {"ndash", 0x2013}, {"ne", 0x2260}, {"ni", 0x220B}, {"not", 0x00AC}, {"notin", 0x2209},
    {"nsub", 0x2284}, {"ntilde", 0x00F1}, {"nu", 0x03BD}, {"oacute", 0x00F3}, {"ocirc", 0x00F4}, {"oelig", 0x0153},
    {"ograve", 0x00F2}, {"oline", 0x203E}, {"omega", 0x03C9}, {"omicron", 0x03BF}, {"oplus", 0x2295}, {"or", 0x2228},
    {"ordf", 0x00AA}, {"ordm", 0x00BA}, {"oslash", 0x00F8}, {"otilde", 0x00F5}, {"otimes", 0x2297}, {"ouml", 0x00F6},
    {"para", 0x00B6}, {"part", 0x2202}, {"permil", 0x2030}, {"perp", 0x22A5}, {"phi", 0x03C6}, {"pi", 0x03C0},
    {"piv", 0x03D6}, {"plusmn", 0x00B1}, {"pound", 0x00A3}, {"prime", 0x2032}, {"prod", 0x220F}, {"prop", 0x221D},
    {"psi", 0x03C8}, {"quot", 0x0022}, {"rArr", 0x21D2}, {"radic", 0x221A}, {"rang", 0x232A}, {"raquo", 0x00BB},
    {"rarr", 0x2192}, {"rceil", 0x2309}, {"rdquo", 0x201D}, {"real", 0x211C}, {"reg", 0x00AE}, {"rfloor", 0x230B},
    {"rho", 0x03C1}, {"rlm", 0x200F}, {"rsaquo", 0x203A}, {"rsquo", 0x2019}, {"sbquo", 0x201A}, {"scaron", 0x0161},
    {"sdot", 0x22C5}, {"sect", 0x00A7}, {"shy", 0x00AD}, {"sigma", 0x03C3}, {"sigmaf", 0x03C2}, {"sim", 0x223C},
    {"spades", 0x2660}, {"sub", 0x2282}, {"sube", 0x2286}, {"sum", 0x2211}, {"sup", 0x2283}, {"sup1", 0x00B9},
    {"sup2", 0x00B2}, {"sup3", 0x00B3}, {"supe", 0x2287}, {"szlig", 0x00DF}, {"tau", 0x03C4}, {"there4", 0x2234},
    {"theta", 0x03B8}, {"thetasym", 0x03D1}, {"thinsp", 0x2009}, {"thorn", 0x00FE}, {"tilde", 0x02DC}, {"times", 0x00D7},
    {"trade", 0x2122}, {"uArr", 0x21D1}, {"uacute", 0x00FA}, {"uarr", 0x2191}, {"ucirc", 0x00FB}, {"ugrave", 0x00F9},
    {"uml", 0x00A8}, {"upsih", 0x03D2}, {"upsilon", 0x03C5}, {"uuml", 0x00FC}, {"weierp", 0x2118}, {"xi", 0x03BE},
    {"yacute", 0x00FD}, {"yen", 0x00A5}, {"yuml", 0x00FF}, {"zeta", 0x03B6}, {"zwj", 0x200D}, {"zwnj", 0x200C},
}};

}  // namespace

std::string decode_entities(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '&') {
      out.push_back(text[i]);
      continue;
    }
    const std::size_t semi = text.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out.push_back('&');
      continue;
    }
    std::string_view ref = text.substr(i + 1, semi - i - 1);
    bool decoded = false;
    if (!ref.empty() && ref[0] == '#') {
      unsigned long cp = 0;
      const bool hex = ref.size() > 1 && (ref[1] == 'x' || ref[1] == 'X');
      std::string_view digits = ref.substr(hex ? 2 : 1);
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, hex ? 16 : 10);
      if (ec == std::errc() && ptr == digits.data() + digits.size() && !digits.empty()) {
        append_utf8(out, static_cast<char32_t>(cp));
        decoded = true;
      }
    } else {
      for (const auto& e : kEntities) {
        if (e.name == ref) {
          append_utf8(out, e.cp);
          decoded = true;
          break;
        }
      }
    }
    if (decoded) {
      i = semi;
    } else {
      out.push_back('&');
    }
  }
  return out;
}

std::optional<std::string_view> Node::attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return std::string_view(v);
  }
  return std::nullopt;
}

bool Node::has_class(std::string_view cls) const {
  auto value = attribute("class");
  if (!value) return false;
  std::string_view v = *value;
  std::size_t pos = 0;
  while (pos < v.size()) {
    while (pos < v.size() && std::isspace(static_cast<unsigned char>(v[pos]))) ++pos;
    std::size_t end = pos;
    while (end < v.size() && !std::isspace(static_cast<unsigned char>(v[end]))) ++end;
    if (v.substr(pos, end - pos) == cls) return true;
    pos = end;
  }
  return false;
}

// --- tree building --------------------------------------------------------

class TreeBuilder {
 public:
  explicit TreeBuilder(std::string_view html) : src_(html) {
    Node root;
    root.name = "#document";
    doc_.nodes_.push_back(std::move(root));
    stack_.push_back(0);
  }

  Document build() {
    while (pos_ < src_.size()) {
      if (src_[pos_] == '<') {
        if (!markup()) text_until_tag();
      } else {
        text_until_tag();
      }
    }
    return std::move(doc_);
  }

 private:
  NodeId append(Node node) {
    node.parent = stack_.back();
    const NodeId id = doc_.nodes_.size();
    doc_.nodes_.push_back(std::move(node));
    doc_.nodes_[stack_.back()].children.push_back(id);
    return id;
  }

  void add_text(std::string text) {
    if (text.empty()) return;
    Node n;
    n.kind = Node::Kind::Text;
    n.text = std::move(text);
    append(std::move(n));
  }

  void text_until_tag() {
    std::size_t end = src_.find('<', pos_ + 1);
    if (end == std::string_view::npos) end = src_.size();
    add_text(decode_entities(src_.substr(pos_, end - pos_)));
    pos_ = end;
  }

  const std::string& top_name() const { return doc_.nodes_[stack_.back()].name; }

  void pop_to(std::size_t index) { stack_.resize(index); }

  // Closes an open element named `name` if only elements satisfying
  // `passable` lie above it.
  void close_open(std::string_view name, const std::function<bool(std::string_view)>& passable) {
    for (std::size_t i = stack_.size(); i-- > 1;) {
      const std::string& n = doc_.nodes_[stack_[i]].name;
      if (n == name) {
        pop_to(i);
        return;
      }
      if (!passable(n)) return;
    }
  }

  // Returns false when the '<' does not start markup and should be text.
  bool markup() {
    if (src_.compare(pos_, 4, "<!--") == 0) {
      const std::size_t end = src_.find("-->", pos_ + 4);
      pos_ = end == std::string_view::npos ? src_.size() : end + 3;
      return true;
    }
    if (pos_ + 1 < src_.size() && (src_[pos_ + 1] == '!' || src_[pos_ + 1] == '?')) {
      const std::size_t end = src_.find('>', pos_);
      pos_ = end == std::string_view::npos ? src_.size() : end + 1;
      return true;
    }
    if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') return end_tag();
    if (pos_ + 1 < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_ + 1]))) return start_tag();
    return false;
  }

  std::string read_name() {
    const std::size_t start = pos_;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '>' || c == '/' || c == '=') break;
      ++pos_;
    }
    return lower(src_.substr(start, pos_ - start));
  }

  void skip_spaces() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool end_tag() {
    pos_ += 2;
    const std::string name = read_name();
    const std::size_t close = src_.find('>', pos_);
    pos_ = close == std::string_view::npos ? src_.size() : close + 1;
    for (std::size_t i = stack_.size(); i-- > 1;) {
      if (doc_.nodes_[stack_[i]].name == name) {
        pop_to(i);
        break;
      }
    }
    return true;
  }

  bool start_tag() {
    ++pos_;
    Node el;
    el.name = read_name();
    bool self_closing = false;
    while (pos_ < src_.size()) {
      skip_spaces();
      if (pos_ >= src_.size()) break;
      if (src_[pos_] == '>') {
        ++pos_;
        break;
      }
      if (src_[pos_] == '/') {
        self_closing = true;
        ++pos_;
        continue;
      }
      std::string key = read_name();
      if (key.empty()) {
        ++pos_;
        continue;
      }
      skip_spaces();
      std::string value;
      if (pos_ < src_.size() && src_[pos_] == '=') {
        ++pos_;
        skip_spaces();
        if (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'')) {
          const char quote = src_[pos_++];
          std::size_t end = src_.find(quote, pos_);
          if (end == std::string_view::npos) end = src_.size();
          value = decode_entities(src_.substr(pos_, end - pos_));
          pos_ = std::min(end + 1, src_.size());
        } else {
          const std::size_t start = pos_;
          while (pos_ < src_.size() && !std::isspace(static_cast<unsigned char>(src_[pos_])) && src_[pos_] != '>') {
            ++pos_;
          }
          value = decode_entities(src_.substr(start, pos_ - start));
        }
      }
      el.attributes.emplace_back(std::move(key), std::move(value));
    }

    const std::string name = el.name;
    if (closes_paragraph(name)) close_open("p", is_inline);
    if (name == "li") {
      close_open("li", [](std::string_view n) { return is_inline(n) || n == "p"; });
    } else if (name == "dt" || name == "dd") {
      close_open("dt", [](std::string_view n) { return is_inline(n) || n == "p"; });
      close_open("dd", [](std::string_view n) { return is_inline(n) || n == "p"; });
    } else if (name == "tr") {
      close_open("tr", [](std::string_view n) { return n == "td" || n == "th" || is_inline(n) || n == "p"; });
    } else if (name == "td" || name == "th") {
      close_open("td", [](std::string_view n) { return is_inline(n) || n == "p"; });
      close_open("th", [](std::string_view n) { return is_inline(n) || n == "p"; });
    }

    const NodeId id = append(std::move(el));
    if (self_closing || is_void(name)) return true;
    stack_.push_back(id);

    if (name == "script" || name == "style" || name == "textarea" || name == "title") {
      std::size_t end = pos_;
      const std::string closing = "</" + name;
      while (end < src_.size() && !istarts_with(src_, end, closing)) ++end;
      std::string_view raw = src_.substr(pos_, end - pos_);
      add_text(name == "script" || name == "style" ? std::string(raw) : decode_entities(raw));
      pos_ = end;
      if (pos_ < src_.size()) {
        const std::size_t close = src_.find('>', pos_);
        pos_ = close == std::string_view::npos ? src_.size() : close + 1;
      }
      stack_.pop_back();
    }
    return true;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Document doc_;
  std::vector<NodeId> stack_;
};

Document Document::parse(std::string_view html) { return TreeBuilder(html).build(); }

// --- text -----------------------------------------------------------------

std::string Document::text_content(NodeId id) const {
  std::string raw;
  std::function<void(NodeId)> walk = [&](NodeId n) {
    const Node& node = nodes_[n];
    if (node.kind == Node::Kind::Text) {
      raw += node.text;
      return;
    }
    if (node.name == "script" || node.name == "style" || node.name == "noscript" || node.name == "template") {
      return;
    }
    const bool block = is_block(node.name);
    if (block) raw.push_back(' ');
    for (NodeId c : node.children) walk(c);
    if (block) raw.push_back(' ');
  };
  walk(id);

  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(raw[i]);
    bool space = std::isspace(c) != 0;
    // U+00A0 no-break space.
    if (c == 0xC2 && i + 1 < raw.size() && static_cast<unsigned char>(raw[i + 1]) == 0xA0) {
      space = true;
      ++i;
    }
    if (space) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(c));
  }
  return out;
}

// --- selectors ------------------------------------------------------------

namespace {

struct AttrTest {
  std::string name;
  char op = '\0';  // '\0' presence, '=', '~', '^', '$', '*'
  std::string value;
};

struct Compound {
  std::string tag;  // empty = any
  std::vector<std::string> ids;
  std::vector<std::string> classes;
  std::vector<AttrTest> attrs;
};

struct Complex {
  std::vector<Compound> parts;
  std::vector<char> combinators;  // combinators[i] joins parts[i] and parts[i+1]
};

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
         static_cast<unsigned char>(c) >= 0x80;
}

class SelectorParser {
 public:
  explicit SelectorParser(std::string_view text) : s_(text) {}

  std::vector<Complex> parse() {
    std::vector<Complex> list;
    while (true) {
      skip_ws();
      list.push_back(complex());
      skip_ws();
      if (pos_ >= s_.size()) break;
      if (s_[pos_] != ',') fail("unexpected character");
      ++pos_;
    }
    return list;
  }

 private:
  [[noreturn]] void fail(std::string_view what) const {
    throw SelectorError("invalid selector '" + std::string(s_) + "': " + std::string(what));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  std::string ident() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
    if (start == pos_) fail("expected identifier");
    return std::string(s_.substr(start, pos_ - start));
  }

  Complex complex() {
    Complex c;
    c.parts.push_back(compound());
    while (true) {
      const std::size_t before = pos_;
      skip_ws();
      if (pos_ >= s_.size() || s_[pos_] == ',') break;
      char comb = ' ';
      if (s_[pos_] == '>') {
        comb = '>';
        ++pos_;
        skip_ws();
      } else if (before == pos_) {
        fail("expected combinator");
      }
      c.combinators.push_back(comb);
      c.parts.push_back(compound());
    }
    return c;
  }

  Compound compound() {
    Compound c;
    bool any = false;
    if (pos_ < s_.size() && s_[pos_] == '*') {
      ++pos_;
      any = true;
    } else if (pos_ < s_.size() && ident_char(s_[pos_])) {
      c.tag = lower(ident());
      any = true;
    }
    while (pos_ < s_.size()) {
      const char ch = s_[pos_];
      if (ch == '#') {
        ++pos_;
        c.ids.push_back(ident());
      } else if (ch == '.') {
        ++pos_;
        c.classes.push_back(ident());
      } else if (ch == '[') {
        ++pos_;
        c.attrs.push_back(attribute());
      } else {
        break;
      }
      any = true;
    }
    if (!any) fail("empty compound selector");
    return c;
  }

  AttrTest attribute() {
    skip_ws();
    AttrTest t;
    t.name = lower(ident());
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == ']') {
      ++pos_;
      return t;
    }
    if (pos_ < s_.size() && s_[pos_] == '=') {
      t.op = '=';
      ++pos_;
    } else if (pos_ + 1 < s_.size() && s_[pos_ + 1] == '=' && std::string_view("~^$*").find(s_[pos_]) != std::string_view::npos) {
      t.op = s_[pos_];
      pos_ += 2;
    } else {
      fail("bad attribute operator");
    }
    skip_ws();
    if (pos_ < s_.size() && (s_[pos_] == '"' || s_[pos_] == '\'')) {
      const char quote = s_[pos_++];
      const std::size_t end = s_.find(quote, pos_);
      if (end == std::string_view::npos) fail("unterminated string");
      t.value = std::string(s_.substr(pos_, end - pos_));
      pos_ = end + 1;
    } else {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && s_[pos_] != ']' && !std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      t.value = std::string(s_.substr(start, pos_ - start));
    }
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != ']') fail("expected ']'");
    ++pos_;
    return t;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

bool matches_attr(const Node& n, const AttrTest& t) {
  auto v = n.attribute(t.name);
  if (!v) return false;
  const std::string_view value = *v;
  switch (t.op) {
    case '\0':
      return true;
    case '=':
      return value == t.value;
    case '^':
      return !t.value.empty() && value.starts_with(t.value);
    case '$':
      return !t.value.empty() && value.ends_with(t.value);
    case '*':
      return !t.value.empty() && value.find(t.value) != std::string_view::npos;
    case '~': {
      Node probe;
      probe.attributes.emplace_back("class", std::string(value));
      return probe.has_class(t.value);
    }
  }
  return false;
}

bool matches_compound(const Node& n, const Compound& c) {
  if (n.kind != Node::Kind::Element || n.name == "#document") return false;
  if (!c.tag.empty() && n.name != c.tag) return false;
  for (const auto& id : c.ids) {
    if (n.attribute("id") != std::optional<std::string_view>(id)) return false;
  }
  for (const auto& cls : c.classes) {
    if (!n.has_class(cls)) return false;
  }
  for (const auto& a : c.attrs) {
    if (!matches_attr(n, a)) return false;
  }
  return true;
}

}  // namespace

std::vector<NodeId> Document::select(std::string_view selector) const {
  const auto list = SelectorParser(selector).parse();

  std::function<bool(NodeId, const Complex&, std::size_t)> matches = [&](NodeId id, const Complex& cx,
                                                                         std::size_t idx) -> bool {
    if (!matches_compound(nodes_[id], cx.parts[idx])) return false;
    if (idx == 0) return true;
    const char comb = cx.combinators[idx - 1];
    std::optional<NodeId> up = nodes_[id].parent;
    if (comb == '>') return up && matches(*up, cx, idx - 1);
    for (; up; up = nodes_[*up].parent) {
      if (matches(*up, cx, idx - 1)) return true;
    }
    return false;
  };

  std::vector<NodeId> out;
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    if (nodes_[id].kind != Node::Kind::Element) continue;
    for (const auto& cx : list) {
      if (matches(id, cx, cx.parts.size() - 1)) {
        out.push_back(id);
        break;
      }
    }
  }
  return out;
}

namespace {

// "." and ".." segments of a path (query and fragment untouched).
std::string remove_dot_segments(const std::string& target) {
  const std::size_t tail = target.find_first_of("?#");
  const std::string path = target.substr(0, tail);
  std::vector<std::string> segments;
  std::size_t pos = 1;
  while (pos <= path.size()) {
    std::size_t next = path.find('/', pos);
    if (next == std::string::npos) next = path.size();
    const std::string seg = path.substr(pos, next - pos);
    const bool last = next == path.size();
    if (seg == "..") {
      if (!segments.empty()) segments.pop_back();
      if (last) segments.emplace_back();
    } else if (seg == ".") {
      if (last) segments.emplace_back();
    } else {
      segments.push_back(seg);
    }
    pos = next + 1;
  }
  std::string out;
  for (const auto& seg : segments) out += "/" + seg;
  if (out.empty()) out = "/";
  return out + (tail == std::string::npos ? "" : target.substr(tail));
}

}  // namespace

std::string resolve_url(std::string_view base, std::string_view ref) {
  const std::string r = trim(ref);
  if (r.empty()) return std::string(base);
  const std::size_t colon = r.find(':');
  const std::size_t first_sep = r.find_first_of("/?#");
  if (colon != std::string::npos && (first_sep == std::string::npos || colon < first_sep)) return r;

  const std::size_t scheme_end = base.find("://");
  if (scheme_end == std::string_view::npos) return r;
  if (r.starts_with("//")) return std::string(base.substr(0, scheme_end + 1)) + r;
  const std::size_t path_start = base.find('/', scheme_end + 3);
  const std::string_view origin = base.substr(0, path_start);
  if (r.front() == '/') return std::string(origin) + remove_dot_segments(r);
  if (path_start == std::string_view::npos) return std::string(origin) + "/" + r;
  std::string_view path = base.substr(path_start);
  path = path.substr(0, path.find_first_of("?#"));
  return std::string(origin) + remove_dot_segments(std::string(path.substr(0, path.rfind('/') + 1)) + r);
}

}  // namespace newsburst::html
