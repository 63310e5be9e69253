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

#ifndef NEWSBURST_EMBED_HPP
#define NEWSBURST_EMBED_HPP

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "newsburst/core.hpp"
#include "newsburst/textpipe.hpp"

namespace newsburst::embed {

class BadVectorFile : public Error {
 public:
  using Error::Error;
};

class NoEmbeddableTokens : public Error {
 public:
  using Error::Error;
};

/// Settings of the subword skip-gram model the vector tables are meant to
/// come from. Documentation only; this library never trains.
namespace model_settings {
inline constexpr std::size_t kDimension = 200;
inline constexpr int kEpochs = 10;
inline constexpr double kLearningRate = 0.1;
inline constexpr int kWindow = 5;
}  // namespace model_settings

/// Token -> vector. Immutable after construction, so shareable across
/// threads. Every vector returned has exactly dimension() finite entries.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dimension() const = 0;
  virtual std::optional<Eigen::VectorXd> lookup(std::string_view token) const = 0;
};

/// Word vectors read from the word2vec/fastText text format: a
/// "count dimension" header, then "token v1 ... vdim" per line.
class TableProvider final : public EmbeddingProvider {
 public:
  static std::unique_ptr<TableProvider> load(const std::filesystem::path& path);
  static std::unique_ptr<TableProvider> parse(std::string_view content);

  std::size_t dimension() const override { return dimension_; }
  std::optional<Eigen::VectorXd> lookup(std::string_view token) const override;
  std::size_t size() const { return rows_.size(); }

 private:
  TableProvider() = default;
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };
  std::size_t dimension_ = 0;
  std::unordered_map<std::string, Eigen::VectorXd, Hash, std::equal_to<>> rows_;
};

/// Deterministic stand-in model. Component i of token t comes from the
/// first 64 bits of HMAC-SHA256(seed, t || 0x00 || le32(i)), mapped affinely
/// onto [-1, 1); the vector is then scaled to unit length. Total: every
/// token has a vector. Bit-identical on every IEEE-754 platform.
class HashProvider final : public EmbeddingProvider {
 public:
  HashProvider(std::size_t dimension, std::uint64_t seed);
  std::size_t dimension() const override { return dimension_; }
  std::optional<Eigen::VectorXd> lookup(std::string_view token) const override;

 private:
  std::size_t dimension_;
  std::string key_;
};

std::unique_ptr<EmbeddingProvider> load_table_provider(const std::filesystem::path& path);
std::unique_ptr<EmbeddingProvider> hash_provider(std::size_t dimension, std::uint64_t seed);

struct VectorizeConfig {
  std::size_t n_tokens = 50;
};

struct ArticleVector {
  std::string article_id;
  Eigen::VectorXd v;  // unit length
};

/// preprocess(title) followed by preprocess(body), cut to cfg.n_tokens.
std::vector<std::string> leading_tokens(const Article& article, const VectorizeConfig& cfg,
                                        const text::Lexicon& lexicon, const text::StopList& stops);

/// normalize(mean of the provider vectors of the leading tokens); tokens
/// the provider does not know are skipped. Throws NoEmbeddableTokens when
/// nothing is left to average.
ArticleVector vectorize_article(const Article& article, const EmbeddingProvider& provider,
                                const VectorizeConfig& cfg, const text::Lexicon& lexicon,
                                const text::StopList& stops);

}  // namespace newsburst::embed

#endif  // NEWSBURST_EMBED_HPP
