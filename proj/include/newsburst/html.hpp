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

#ifndef NEWSBURST_HTML_HPP
#define NEWSBURST_HTML_HPP

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "newsburst/core.hpp"

/// Lenient HTML reading for article pages: a tag-soup tree builder and a
/// small CSS selector engine (type, #id, .class, [attr], [attr=v], [attr^=v],
/// [attr$=v], [attr*=v], [attr~=v], descendant and child combinators,
/// comma-separated lists).
namespace newsburst::html {

class SelectorError : public Error {
 public:
  using Error::Error;
};

using NodeId = std::size_t;

struct Node {
  enum class Kind { Element, Text };
  Kind kind = Kind::Element;
  std::string name;  // lowercase tag name for elements
  std::vector<std::pair<std::string, std::string>> attributes;
  std::string text;  // entity-decoded content for text nodes
  std::optional<NodeId> parent;
  std::vector<NodeId> children;

  std::optional<std::string_view> attribute(std::string_view key) const;
  bool has_class(std::string_view cls) const;
};

class Document {
 public:
  static Document parse(std::string_view html);

  const Node& node(NodeId id) const { return nodes_.at(id); }
  NodeId root() const { return 0; }
  std::size_t size() const { return nodes_.size(); }

  /// Matches in document order, without duplicates.
  std::vector<NodeId> select(std::string_view selector) const;

  /// Visible text below `id` with whitespace runs collapsed. Script and
  /// style content is skipped; block boundaries become spaces.
  std::string text_content(NodeId id) const;

 private:
  std::vector<Node> nodes_;
  friend class TreeBuilder;
};

/// Decodes character references (&amp;, &#269;, &#x10D;, common named ones).
std::string decode_entities(std::string_view text);

/// Resolves `ref` against an absolute `base` URL (scheme-relative,
/// root-relative, and path-relative references).
std::string resolve_url(std::string_view base, std::string_view ref);

}  // namespace newsburst::html

#endif  // NEWSBURST_HTML_HPP
