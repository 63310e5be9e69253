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

#include "newsburst/textpipe.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <fstream>

namespace newsburst::text {

namespace {

struct CodePoint {
  UChar32 value;
  std::size_t begin;
  std::size_t end;
};

// Decodes the code point at byte offset `i`; malformed bytes yield U+FFFD.
CodePoint decode_at(std::string_view s, std::size_t i) {
  int32_t pos = static_cast<int32_t>(i);
  UChar32 c = 0;
  U8_NEXT(reinterpret_cast<const uint8_t*>(s.data()), pos, static_cast<int32_t>(s.size()), c);
  if (c < 0) c = 0xFFFD;
  return {c, i, static_cast<std::size_t>(pos)};
}

std::vector<CodePoint> decode(std::string_view s) {
  std::vector<CodePoint> out;
  for (std::size_t i = 0; i < s.size();) {
    out.push_back(decode_at(s, i));
    i = out.back().end;
  }
  return out;
}

void append_cp(std::string& out, UChar32 c) {
  uint8_t buf[U8_MAX_LENGTH];
  int32_t len = 0;
  U8_APPEND_UNSAFE(buf, len, c);
  out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(len));
}

bool is_word_char(UChar32 c) {
  if (u_isalnum(c)) return true;
  const int8_t type = u_charType(c);
  return type == U_NON_SPACING_MARK || type == U_COMBINING_SPACING_MARK;
}

bool is_hyphen(UChar32 c) { return c == U'-' || c == 0x2010 || c == 0x2011; }

bool is_closing(UChar32 c) {
  return c == U'"' || c == U'\'' || c == U')' || c == U']' || c == 0x201C || c == 0x201D || c == 0x2019 ||
         c == 0x00BB || c == 0x00AB;
}

bool is_opening(UChar32 c) {
  return c == U'"' || c == U'\'' || c == U'(' || c == U'[' || c == 0x201E || c == 0x201C || c == 0x201A ||
         c == 0x00AB || c == 0x00BB || c == 0x2018;
}

template <typename Sink>
void read_lines(const std::filesystem::path& path, Sink&& sink) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (number == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (line.empty() || line.front() == '#') continue;
    sink(line, number);
  }
}

}  // namespace

std::string fold_case(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (const auto& cp : decode(text)) append_cp(out, u_foldCase(cp.value, U_FOLD_CASE_DEFAULT));
  return out;
}

Lexicon::Lexicon(std::initializer_list<std::pair<std::string_view, std::string_view>> entries) {
  for (const auto& [surface, lemma] : entries) add(surface, lemma);
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  Lexicon lex;
  read_lines(path, [&](const std::string& line, std::size_t number) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
      throw ConfigError(path.string() + ":" + std::to_string(number) + ": expected 'surface<TAB>lemma'");
    }
    lex.add(trim(std::string_view(line).substr(0, tab)), trim(std::string_view(line).substr(tab + 1)));
  });
  return lex;
}

void Lexicon::add(std::string_view surface, std::string_view lemma) {
  if (surface.empty() || lemma.empty()) throw PreconditionError("lexicon entries must be non-empty");
  map_.insert_or_assign(fold_case(surface), fold_case(lemma));
}

std::string_view Lexicon::lookup(std::string_view token) const {
  auto it = map_.find(token);
  return it == map_.end() ? token : std::string_view(it->second);
}

StopList::StopList(std::initializer_list<std::string_view> lemmas) {
  for (auto l : lemmas) add(l);
}

StopList StopList::load(const std::filesystem::path& path) {
  StopList stops;
  read_lines(path, [&](const std::string& line, std::size_t) {
    std::string word = trim(line);
    if (!word.empty()) stops.add(word);
  });
  return stops;
}

void StopList::add(std::string_view lemma) { set_.insert(fold_case(lemma)); }

const std::set<std::string, std::less<>>& default_abbreviations() {
  static const std::set<std::string, std::less<>> kAbbrev = {
      "dr",  "ing", "mgr", "bc",   "phdr", "judr", "mudr", "rndr", "paeddr", "doc", "prof", "csc", "drsc",
      "p",   "pí",  "sl",  "sv",   "tzv",  "např", "atd",  "apod", "aj",     "resp", "tj",  "mj",  "č",
      "čj",  "odst", "písm", "str", "viz",  "cca",  "tis",  "mil",  "mld",    "kč",  "hod", "min", "ul",
      "nám", "mr",  "mrs", "ms",   "jr",   "sr",   "st",   "vs",   "etc",    "no",  "gen", "plk", "npor"};
  return kAbbrev;
}

std::vector<std::string> split_sentences(std::string_view text,
                                         const std::set<std::string, std::less<>>& abbreviations) {
  const auto cps = decode(text);
  std::vector<std::string> out;
  auto emit = [&](std::size_t begin, std::size_t end) {
    std::string s = trim(text.substr(begin, end - begin));
    if (!s.empty()) out.push_back(std::move(s));
  };

  std::size_t sentence_start = 0;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const UChar32 c = cps[i].value;
    if (c != U'.' && c != U'!' && c != U'?') continue;

    // Abbreviation or initial before a single period.
    if (c == U'.' && (i + 1 >= cps.size() || cps[i + 1].value != U'.')) {
      std::size_t w = i;
      while (w > 0 && is_word_char(cps[w - 1].value)) --w;
      const std::size_t word_len = i - w;
      if (word_len > 0) {
        const std::string word = fold_case(text.substr(cps[w].begin, cps[i].begin - cps[w].begin));
        if (word_len == 1 && u_isalpha(cps[w].value)) continue;
        if (abbreviations.contains(word)) continue;
      }
    }

    std::size_t j = i + 1;
    while (j < cps.size() && (cps[j].value == U'.' || cps[j].value == U'!' || cps[j].value == U'?' ||
                              is_closing(cps[j].value))) {
      ++j;
    }
    const std::size_t terminator_end = j;
    if (j >= cps.size() || !u_isUWhiteSpace(cps[j].value)) {
      i = terminator_end - 1;
      continue;
    }
    while (j < cps.size() && u_isUWhiteSpace(cps[j].value)) ++j;
    std::size_t k = j;
    while (k < cps.size() && is_opening(cps[k].value)) ++k;
    if (k < cps.size() && (u_isupper(cps[k].value) || u_istitle(cps[k].value) || u_isdigit(cps[k].value))) {
      const std::size_t end_byte = terminator_end < cps.size() ? cps[terminator_end].begin : text.size();
      emit(sentence_start, end_byte);
      sentence_start = cps[j].begin;
      i = j - 1;
    } else {
      i = terminator_end - 1;
    }
  }
  emit(sentence_start, text.size());
  return out;
}

std::vector<std::string> tokenize(std::string_view sentence) {
  const auto cps = decode(sentence);
  std::vector<std::string> out;
  std::string current;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const UChar32 c = cps[i].value;
    if (is_word_char(c)) {
      append_cp(current, u_foldCase(c, U_FOLD_CASE_DEFAULT));
    } else if (is_hyphen(c) && !current.empty() && i + 1 < cps.size() && is_word_char(cps[i + 1].value)) {
      current.push_back('-');
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::string lemmatize(std::string_view token, const Lexicon& lexicon) { return std::string(lexicon.lookup(token)); }

std::vector<std::string> preprocess(std::string_view text, const Lexicon& lexicon, const StopList& stops) {
  std::vector<std::string> out;
  for (const auto& sentence : split_sentences(text)) {
    for (const auto& token : tokenize(sentence)) {
      std::string lemma = lemmatize(token, lexicon);
      if (!stops.contains(lemma)) out.push_back(std::move(lemma));
    }
  }
  return out;
}

}  // namespace newsburst::text
