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

#include "newsburst/core.hpp"

#include <openssl/evp.h>

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

namespace newsburst {

std::string_view to_string(Region region) {
  return region == Region::National ? "National" : "International";
}

std::optional<Region> parse_region(std::string_view text) {
  if (text == "National" || text == "national") return Region::National;
  if (text == "International" || text == "international") return Region::International;
  return std::nullopt;
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

std::string sha256_hex(std::string_view text) {
  return sha256_hex(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string make_article_id(std::string_view source_id, std::string_view guid) {
  std::string key;
  key.reserve(source_id.size() + guid.size() + 1);
  key.append(source_id).push_back('\0');
  key.append(guid);
  return sha256_hex(key).substr(0, 20);
}

std::string content_hash(const Article& a) {
  std::string key;
  for (std::string_view part : {std::string_view(a.title), std::string_view(a.perex),
                                std::string_view(a.body), std::string_view(a.url)}) {
    key.append(part).push_back('\0');
  }
  key.append(a.image_url.value_or("")).push_back('\0');
  for (const auto& c : a.categories) key.append(c).push_back('\x1f');
  return sha256_hex(key);
}

// --- time -----------------------------------------------------------------

namespace {

using namespace std::chrono;

std::optional<Timestamp> make_time(int y, int mo, int d, int h, int mi, int s, int offset_minutes) {
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 60) return std::nullopt;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} - minutes{offset_minutes};
}

class Scanner {
 public:
  explicit Scanner(std::string_view text) : text_(text) {}

  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return done() ? '\0' : text_[pos_]; }
  void skip_spaces() {
    while (!done() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  // Reads exactly `min..max` digits.
  std::optional<int> digits(std::size_t min, std::size_t max) {
    std::size_t start = pos_;
    while (pos_ < text_.size() && pos_ - start < max && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ - start < min) {
      pos_ = start;
      return std::nullopt;
    }
    int v = 0;
    std::from_chars(text_.data() + start, text_.data() + pos_, v);
    return v;
  }
  std::string_view word() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return text_.substr(start, pos_ - start);
  }
  std::string_view rest() const { return text_.substr(std::min(pos_, text_.size())); }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i]))) return false;
  }
  return true;
}

constexpr std::array<std::string_view, 12> kMonths = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                      "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
constexpr std::array<std::string_view, 7> kWeekdays = {"Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat"};

std::optional<int> numeric_offset(Scanner& sc) {
  const char sign = sc.peek();
  if (sign != '+' && sign != '-') return std::nullopt;
  sc.eat(sign);
  auto hh = sc.digits(2, 2);
  if (!hh) return std::nullopt;
  sc.eat(':');
  auto mm = sc.digits(2, 2);
  if (!mm) return std::nullopt;
  const int total = *hh * 60 + *mm;
  return sign == '-' ? -total : total;
}

}  // namespace

std::string format_iso8601(Timestamp t) {
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{t - day_point};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long>(hms.seconds().count()));
  return buf;
}

std::string format_rfc822(Timestamp t) {
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const weekday wd{day_point};
  const hh_mm_ss hms{t - day_point};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s, %02u %s %04d %02ld:%02ld:%02ld +0000",
                std::string(kWeekdays[wd.c_encoding()]).c_str(), static_cast<unsigned>(ymd.day()),
                std::string(kMonths[static_cast<unsigned>(ymd.month()) - 1]).c_str(),
                static_cast<int>(ymd.year()), static_cast<long>(hms.hours().count()),
                static_cast<long>(hms.minutes().count()), static_cast<long>(hms.seconds().count()));
  return buf;
}

std::optional<Timestamp> parse_iso8601(std::string_view text) {
  const std::string trimmed = trim(text);
  Scanner sc(trimmed);
  auto y = sc.digits(4, 4);
  if (!y || !sc.eat('-')) return std::nullopt;
  auto mo = sc.digits(2, 2);
  if (!mo || !sc.eat('-')) return std::nullopt;
  auto d = sc.digits(2, 2);
  if (!d) return std::nullopt;
  if (sc.done()) return make_time(*y, *mo, *d, 0, 0, 0, 0);
  if (!sc.eat('T') && !sc.eat('t') && !sc.eat(' ')) return std::nullopt;
  auto h = sc.digits(2, 2);
  if (!h || !sc.eat(':')) return std::nullopt;
  auto mi = sc.digits(2, 2);
  if (!mi) return std::nullopt;
  int s = 0;
  if (sc.eat(':')) {
    auto sv = sc.digits(2, 2);
    if (!sv) return std::nullopt;
    s = *sv;
    if (sc.eat('.') || sc.eat(',')) {
      if (!sc.digits(1, 9)) return std::nullopt;
    }
  }
  int offset = 0;
  if (sc.eat('Z') || sc.eat('z')) {
  } else if (!sc.done()) {
    auto off = numeric_offset(sc);
    if (!off) return std::nullopt;
    offset = *off;
  }
  if (!sc.done()) return std::nullopt;
  return make_time(*y, *mo, *d, *h, *mi, s, offset);
}

std::optional<Timestamp> parse_rfc822(std::string_view text) {
  const std::string trimmed = trim(text);
  Scanner sc(trimmed);
  // Optional "Thu," prefix.
  {
    Scanner probe = sc;
    auto w = probe.word();
    if (!w.empty()) {
      probe.skip_spaces();
      if (!probe.eat(',')) return std::nullopt;
      sc = probe;
    }
  }
  sc.skip_spaces();
  auto d = sc.digits(1, 2);
  if (!d) return std::nullopt;
  sc.skip_spaces();
  auto mon = sc.word();
  int month_index = 0;
  for (std::size_t i = 0; i < kMonths.size(); ++i) {
    if (mon.size() >= 3 && iequals(mon.substr(0, 3), kMonths[i])) month_index = static_cast<int>(i) + 1;
  }
  if (month_index == 0) return std::nullopt;
  sc.skip_spaces();
  auto y = sc.digits(2, 4);
  if (!y) return std::nullopt;
  int year_value = *y;
  if (year_value < 100) year_value += year_value < 50 ? 2000 : 1900;
  sc.skip_spaces();
  auto h = sc.digits(1, 2);
  if (!h || !sc.eat(':')) return std::nullopt;
  auto mi = sc.digits(2, 2);
  if (!mi) return std::nullopt;
  int s = 0;
  if (sc.eat(':')) {
    auto sv = sc.digits(2, 2);
    if (!sv) return std::nullopt;
    s = *sv;
  }
  sc.skip_spaces();
  int offset = 0;
  if (!sc.done()) {
    if (auto off = numeric_offset(sc)) {
      offset = *off;
    } else {
      auto zone = sc.word();
      struct Named {
        std::string_view name;
        int minutes;
      };
      static constexpr Named kZones[] = {{"GMT", 0},     {"UT", 0},      {"UTC", 0},     {"Z", 0},
                                         {"EST", -300},  {"EDT", -240},  {"CST", -360},  {"CDT", -300},
                                         {"MST", -420},  {"MDT", -360},  {"PST", -480},  {"PDT", -420},
                                         {"CET", 60},    {"CEST", 120}};
      bool found = false;
      for (const auto& z : kZones) {
        if (iequals(zone, z.name)) {
          offset = z.minutes;
          found = true;
        }
      }
      // Single-letter military zones carry no reliable sign; read as UTC.
      if (!found && zone.size() != 1) return std::nullopt;
    }
  }
  sc.skip_spaces();
  if (!sc.done()) return std::nullopt;
  return make_time(year_value, month_index, *d, *h, *mi, s, offset);
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  if (auto t = parse_iso8601(text)) return t;
  return parse_rfc822(text);
}

std::size_t utf8_length(std::string_view text) {
  std::size_t n = 0;
  for (unsigned char c : text) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::size_t utf8_offset(std::string_view text, std::size_t chars) {
  std::size_t seen = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
      if (seen == chars) return i;
      ++seen;
    }
  }
  return text.size();
}

std::string trim(std::string_view text) {
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && is_space(text[b])) ++b;
  while (e > b && is_space(text[e - 1])) --e;
  return std::string(text.substr(b, e - b));
}

}  // namespace newsburst
