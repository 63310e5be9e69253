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

#ifndef NEWSBURST_TEXTPIPE_HPP
#define NEWSBURST_TEXTPIPE_HPP

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "newsburst/core.hpp"

namespace newsburst::text {

/// Unicode simple case folding, code point by code point. Diacritics are
/// kept ("Řeka" -> "řeka").
std::string fold_case(std::string_view text);

/// Dictionary lemmatizer: surface form -> lemma. Unknown forms pass through.
class Lexicon {
 public:
  Lexicon() = default;
  Lexicon(std::initializer_list<std::pair<std::string_view, std::string_view>> entries);

  /// UTF-8, one "surface<TAB>lemma" per line, '#' starts a comment line.
  static Lexicon load(const std::filesystem::path& path);

  void add(std::string_view surface, std::string_view lemma);
  std::string_view lookup(std::string_view token) const;
  std::size_t size() const { return map_.size(); }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };
  std::unordered_map<std::string, std::string, Hash, std::equal_to<>> map_;
};

class StopList {
 public:
  StopList() = default;
  StopList(std::initializer_list<std::string_view> lemmas);

  /// UTF-8, one lemma per line, '#' starts a comment line.
  static StopList load(const std::filesystem::path& path);

  void add(std::string_view lemma);
  bool contains(std::string_view lemma) const { return set_.find(lemma) != set_.end(); }
  std::size_t size() const { return set_.size(); }

 private:
  std::set<std::string, std::less<>> set_;
};

/// Abbreviations (case-folded, without the trailing dot) after which a
/// period does not end a sentence. Czech titles and common shorthands.
const std::set<std::string, std::less<>>& default_abbreviations();

/// Splits after '.', '!' or '?' (plus any closing quotes/brackets) when the
/// next non-space character is an uppercase letter or a digit, optionally
/// behind an opening quote. A period after a listed abbreviation or a single
/// letter (an initial) never splits. Sentences are trimmed.
std::vector<std::string> split_sentences(std::string_view text,
                                         const std::set<std::string, std::less<>>& abbreviations =
                                             default_abbreviations());

/// Letter/digit runs, case-folded; hyphens between two word characters stay
/// inside the token, all other punctuation separates and is dropped.
std::vector<std::string> tokenize(std::string_view sentence);

std::string lemmatize(std::string_view token, const Lexicon& lexicon);

/// split_sentences -> tokenize -> lemmatize -> drop stop lemmas.
std::vector<std::string> preprocess(std::string_view text, const Lexicon& lexicon, const StopList& stops);

}  // namespace newsburst::text

#endif  // NEWSBURST_TEXTPIPE_HPP
